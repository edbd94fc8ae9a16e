"""QNN circuit assembly: strongly entangling blocks interleaved with encodings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import encodings
from .errors import AliasingError, ArchitectureError, ContractError
from .simulator import (
    Circuit,
    ControlledNot,
    GeneralRotation,
    evaluate_batch,
)

ANSATZ_MODES = ("univariate", "sequential", "parallel")


@dataclass(frozen=True)
class ArchitectureSpec:
    family: str
    R: int
    L: int
    N: int = 1
    ansatz_mode: str = "univariate"
    entangling_depth: int = 5

    def __post_init__(self):
        fam = self.family.name if isinstance(self.family, encodings.EncodingFamily) else str(self.family).lower()
        object.__setattr__(self, "family", fam)
        if self.ansatz_mode not in ANSATZ_MODES:
            raise ArchitectureError(f"unknown ansatz {self.ansatz_mode!r}; expected one of {ANSATZ_MODES}")
        if self.R < 1 or self.L < 1 or self.N < 1 or self.entangling_depth < 1:
            raise ArchitectureError(
                f"R, L, N and entangling_depth must be positive, got {self.R}, {self.L}, {self.N}, {self.entangling_depth}"
            )
        if self.ansatz_mode == "univariate" and self.N != 1:
            raise ArchitectureError("univariate ansatz takes exactly one feature")
        self.encoding  # raises for invalid family/R combinations

    @property
    def A(self) -> int:
        return self.R * self.L

    @property
    def encoding(self) -> encodings.EncodingFamily:
        fam = encodings.family(self.family, self.R)
        if self.R % fam.q:
            raise ArchitectureError(f"block width {fam.q} does not divide R={self.R}")
        return fam

    @property
    def qubit_count(self) -> int:
        return self.N * self.R if self.ansatz_mode == "parallel" else self.R


def entangling_block(R: int, depth: int, first_slot: int = 0, qubit_offset: int = 0) -> list:
    """Rotation layer plus CNOT ring per block; ring range cycles through 1..R-1."""
    if depth < 1:
        raise ContractError("entangling depth must be >= 1")
    gates = []
    slot = first_slot
    for b in range(depth):
        for q in range(R):
            gates.append(GeneralRotation(qubit_offset + q, (slot, slot + 1, slot + 2)))
            slot += 3
        if R >= 2:
            rng = b % (R - 1) + 1
            for q in range(R):
                gates.append(ControlledNot(qubit_offset + q, qubit_offset + (q + rng) % R))
    return gates


def param_count(spec: ArchitectureSpec) -> int:
    per_qubit = spec.entangling_depth * 3
    if spec.ansatz_mode == "sequential":
        return spec.R * (spec.L * spec.N + 1) * per_qubit
    return spec.qubit_count * (spec.L + 1) * per_qubit


def build(spec: ArchitectureSpec) -> Circuit:
    fam = spec.encoding
    n = spec.qubit_count
    gates = []
    slot = 0

    def W():
        nonlocal slot
        block = entangling_block(n, spec.entangling_depth, slot)
        slot += n * spec.entangling_depth * 3
        gates.extend(block)

    if spec.ansatz_mode == "sequential":
        for feat in range(spec.N):
            for l in range(1, spec.L + 1):
                W()
                gates.extend(encodings.data_layer(fam, spec.R, spec.L, l, data_slot=feat))
        W()
    else:
        W()
        for l in range(1, spec.L + 1):
            for feat in range(spec.N):
                gates.extend(
                    encodings.data_layer(fam, spec.R, spec.L, l, data_slot=feat, qubit_offset=feat * spec.R)
                )
            W()
    circuit = Circuit(n, gates, slot, spec.N, meta={"spec": spec})
    assert circuit.parameter_slot_count == param_count(spec)
    return circuit


def init_params(circuit_or_count, seed) -> np.ndarray:
    """Uniform samples on ``[0, 2*pi)`` from a seeded generator."""
    count = circuit_or_count if isinstance(circuit_or_count, int) else circuit_or_count.parameter_slot_count
    return np.random.default_rng(seed).uniform(0.0, 2 * np.pi, size=count)


def evaluate(circuit: Circuit, theta, x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != circuit.data_slot_count:
        raise ContractError(f"expected {circuit.data_slot_count} data values, got {x.shape[0]}")
    return float(evaluate_batch(circuit, theta, x.reshape(1, -1))[0])


def fourier_grid(points: int) -> np.ndarray:
    return 2 * np.pi * np.arange(points) / points


def extract_fourier_coefficients(circuit: Circuit, theta, omega_max: int, points: int | None = None) -> dict:
    """Fourier coefficients ``c_w`` for ``|w| <= omega_max`` of a univariate circuit.

    Frequencies are integers for every supported encoding, so one period is
    ``2*pi``. The grid needs at least ``2*omega_max + 1`` points.
    """
    if circuit.data_slot_count != 1:
        raise ContractError("coefficient extraction is univariate only")
    spec = circuit.meta.get("spec")
    if spec is not None:
        from .spectrum import frequency_spectrum

        top = int(frequency_spectrum(spec.family, spec.R, spec.L, with_degeneracy=False).omega.numerators[-1])
        if omega_max < top:
            raise AliasingError(f"omega_max={omega_max} is below the spectrum's top frequency {top}")
    need = 2 * omega_max + 1
    points = need if points is None else points
    if points < need:
        raise AliasingError(f"{points} grid points cannot resolve frequencies up to {omega_max}")
    f = evaluate_batch(circuit, theta, fourier_grid(points).reshape(-1, 1))
    c = np.fft.fft(f) / points
    return {w: complex(c[w % points]) for w in range(-omega_max, omega_max + 1)}


def fourier_series(coeffs: dict, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for w, c in coeffs.items():
        out += c * np.exp(1j * w * x)
    return out
