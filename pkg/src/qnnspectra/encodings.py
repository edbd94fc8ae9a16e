"""Coefficient schedules and data-encoding gates for the six encoding families.

Every family encodes ``x`` through sub-generators ``beta[r, l] * H`` acting on
blocks of ``q`` qubits. Single-qubit families use ``H = Z/2``; turnpike and
golomb use a fixed diagonal integer Hamiltonian on 2 or 3 qubits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArchitectureError, ContractError
from .simulator import DiagonalPhase

FAMILIES = ("hamming", "binary", "exponential", "ternary", "turnpike", "golomb")
SINGLE_QUBIT = ("hamming", "binary", "exponential", "ternary")

HALF = (Fraction(-1, 2), Fraction(1, 2))

# relaxed-turnpike solution with K=24 and an 8-mark Golomb ruler; the 4-mark
# ruler serves both multi-qubit families at q=2
FIXED_EIGENVALUES = {
    ("turnpike", 2): (0, 1, 4, 6),
    ("turnpike", 3): (0, 8, 15, 17, 20, 21, 31, 39),
    ("golomb", 2): (0, 1, 4, 6),
    ("golomb", 3): (0, 1, 4, 9, 15, 22, 32, 34),
}


@dataclass(frozen=True)
class EncodingFamily:
    name: str
    q: int = 1
    fixed_eigenvalues: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ArchitectureError(f"unknown encoding family {self.name!r}; expected one of {FAMILIES}")
        if self.name in SINGLE_QUBIT:
            if self.q != 1 or self.fixed_eigenvalues is not None:
                raise ArchitectureError(f"{self.name} acts on single qubits")
            return
        eig = self.fixed_eigenvalues
        if eig is None:
            eig = FIXED_EIGENVALUES.get((self.name, self.q))
            if eig is None:
                raise ArchitectureError(f"no default Hamiltonian for {self.name} with q={self.q}")
        eig = tuple(int(e) for e in eig)
        if len(eig) != 1 << self.q:
            raise ArchitectureError(f"{self.name} with q={self.q} needs {1 << self.q} eigenvalues")
        if list(eig) != sorted(eig) or eig[0] != 0:
            raise ArchitectureError("fixed eigenvalues must be sorted ascending and start at 0")
        object.__setattr__(self, "fixed_eigenvalues", eig)


def block_width(name: str, R: int) -> int:
    """Block width used for ``name`` on ``R`` qubits (3 if 3 | R, else 2 if 2 | R)."""
    if name in SINGLE_QUBIT:
        return 1
    if name not in FAMILIES:
        raise ArchitectureError(f"unknown encoding family {name!r}; expected one of {FAMILIES}")
    if R % 3 == 0:
        return 3
    if R % 2 == 0:
        return 2
    raise ArchitectureError(f"{name} encoding needs R divisible by 2 or 3, got R={R}")


def family(name, R: int | None = None) -> EncodingFamily:
    """Resolve a family name (or pass through an ``EncodingFamily``) for ``R`` qubits."""
    if isinstance(name, EncodingFamily):
        return name
    name = str(name).lower()
    if name in SINGLE_QUBIT:
        return EncodingFamily(name)
    if R is None:
        raise ArchitectureError(f"{name} needs a qubit count to pick its block width")
    return EncodingFamily(name, block_width(name, R))


def subgenerator_eigenvalues(fam: EncodingFamily) -> tuple:
    if fam.q == 1 and fam.fixed_eigenvalues is None:
        return HALF
    return fam.fixed_eigenvalues


def _base(fam: EncodingFamily) -> int:
    if fam.name in ("binary", "exponential"):
        return 2
    if fam.name == "ternary":
        return 3
    eig = fam.fixed_eigenvalues
    if fam.name == "turnpike":
        from .spectrum import turnpike_K

        return 2 * turnpike_K(eig) + 1
    return 2 * (eig[-1] - eig[0]) + 1


@dataclass(frozen=True)
class CoefficientSchedule:
    beta: np.ndarray  # shape (R/q, L), integer

    def __getitem__(self, rl):
        return self.beta[rl]


def schedule(fam, R: int, L: int) -> CoefficientSchedule:
    fam = family(fam, R)
    if R < 1 or L < 1:
        raise ArchitectureError(f"shape must be positive, got (R, L)=({R}, {L})")
    if R % fam.q:
        raise ArchitectureError(f"block width q={fam.q} does not divide R={R}")
    blocks = R // fam.q
    if fam.name == "hamming":
        return CoefficientSchedule(np.ones((blocks, L), dtype=np.int64))
    base = _base(fam)
    r = np.arange(blocks)[:, None]
    l = np.arange(L)[None, :]
    exponent = l + L * r
    beta = np.array([[base ** int(e) for e in row] for row in exponent], dtype=object)
    A = R * L
    if fam.name == "exponential":
        if A == 1:
            beta[...] = 1
        else:
            beta[-1, -1] = 2 ** (A - 1) + 1
    if max(beta.ravel()) < 2 ** 62:
        beta = beta.astype(np.int64)
    return CoefficientSchedule(beta)


def data_layer(fam, R: int, L: int, l: int, data_slot: int = 0, qubit_offset: int = 0) -> list:
    """Diagonal phase gates of encoding layer ``l`` (1-based), one per q-qubit block."""
    fam = family(fam, R)
    if not 1 <= l <= L:
        raise ContractError(f"layer index {l} outside 1..{L}")
    beta = schedule(fam, R, L).beta
    eig = np.array([float(e) for e in subgenerator_eigenvalues(fam)])
    gates = []
    for r in range(R // fam.q):
        qubits = tuple(qubit_offset + r * fam.q + i for i in range(fam.q))
        gates.append(DiagonalPhase(qubits, float(beta[r, l - 1]) * eig, data_slot))
    return gates
