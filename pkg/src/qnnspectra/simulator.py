"""Dense statevector simulation with the fixed observable Z on qubit 0.

Qubit 0 is the most significant bit of the basis index. Three gate kinds
exist: a general single-qubit rotation ``RZ(a) RY(b) RZ(c)`` with three
parameter slots, a CNOT, and a diagonal phase ``exp(-i x phi_j)`` on a qubit
subset driven by one data slot. Rotations are lowered to elementary RZ/RY
ops with eigenvalue +-1/2 generators, which is what the adjoint sweep and
the parameter-shift rule rely on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from . import kernels
from .errors import CapacityError, ContractError
from .kernels import KIND_CNOT, KIND_DIAG, KIND_RY, KIND_RZ

MAX_QUBITS = 24


@dataclass(frozen=True)
class GeneralRotation:
    qubit: int
    slots: tuple[int, int, int]


@dataclass(frozen=True)
class ControlledNot:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ContractError("control and target must differ")


@dataclass(frozen=True, eq=False)
class DiagonalPhase:
    """``|j> -> exp(-i x angles[j]) |j>`` on ``qubits`` (first listed is most significant)."""

    qubits: tuple[int, ...]
    angles: np.ndarray
    data_slot: int

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        if angles.shape != (1 << len(self.qubits),):
            raise ContractError(
                f"DiagonalPhase on {len(self.qubits)} qubits needs {1 << len(self.qubits)} angles, "
                f"got shape {angles.shape}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ContractError("DiagonalPhase qubits must be distinct")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "angles", angles)


GateOp = Union[GeneralRotation, ControlledNot, DiagonalPhase]


def _gate_qubits(gate):
    if isinstance(gate, GeneralRotation):
        return (gate.qubit,)
    if isinstance(gate, ControlledNot):
        return (gate.control, gate.target)
    return gate.qubits


def _full_angles(gate: DiagonalPhase, n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    j = np.zeros(1 << n, dtype=np.int64)
    for q in gate.qubits:
        j = (j << 1) | ((idx >> (n - 1 - q)) & 1)
    return gate.angles[j]


@dataclass
class StateVector:
    amplitudes: np.ndarray
    qubit_count: int

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.qubit_count,):
            raise ContractError("amplitude vector length must be 2**qubit_count")

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class Circuit:
    """Immutable gate program with parameter and data slots."""

    qubit_count: int
    gates: tuple
    parameter_slot_count: int
    data_slot_count: int
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        _check_qubits(self.qubit_count)
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in _gate_qubits(g):
                if not 0 <= q < self.qubit_count:
                    raise ContractError(f"qubit index {q} out of range for {self.qubit_count} qubits")
            if isinstance(g, GeneralRotation) and max(g.slots) >= self.parameter_slot_count:
                raise ContractError(f"parameter slot {max(g.slots)} >= {self.parameter_slot_count}")
            if isinstance(g, DiagonalPhase) and g.data_slot >= self.data_slot_count:
                raise ContractError(f"data slot {g.data_slot} >= {self.data_slot_count}")

    @cached_property
    def program(self) -> tuple[np.ndarray, np.ndarray]:
        """Lowered ``(ops, diag)`` arrays consumed by the kernels."""
        n = self.qubit_count
        ops, diag = [], []
        for g in self.gates:
            if isinstance(g, GeneralRotation):
                a, b, c = g.slots
                ops += [(KIND_RZ, g.qubit, 0, c), (KIND_RY, g.qubit, 0, b), (KIND_RZ, g.qubit, 0, a)]
            elif isinstance(g, ControlledNot):
                ops.append((KIND_CNOT, g.control, g.target, 0))
            else:
                ops.append((KIND_DIAG, len(diag), 0, g.data_slot))
                diag.append(_full_angles(g, n))
        ops_arr = np.array(ops, dtype=np.int64).reshape(-1, 4)
        diag_arr = np.array(diag, dtype=float).reshape(-1, 1 << n)
        return ops_arr, diag_arr

    def count(self, kind) -> int:
        return sum(isinstance(g, kind) for g in self.gates)


def _check_qubits(R):
    if not isinstance(R, (int, np.integer)) or not 1 <= R <= MAX_QUBITS:
        raise CapacityError(f"qubit count must be in [1, {MAX_QUBITS}], got {R!r}")


def init_state(R: int) -> StateVector:
    _check_qubits(R)
    amps = np.zeros(1 << R, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, R)


def _bound(values, slot, what):
    if values is None:
        raise ContractError(f"{what} slot {slot} is unbound")
    values = np.asarray(values, dtype=float).ravel()
    if not 0 <= slot < values.shape[0]:
        raise ContractError(f"{what} slot {slot} is unbound (only {values.shape[0]} values given)")
    return float(values[slot])


def rotation_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """2x2 matrix of ``RZ(alpha) @ RY(beta) @ RZ(gamma)``."""
    rz = lambda t: np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    return rz(alpha) @ np.array([[c, -s], [s, c]]) @ rz(gamma)


def apply_gate(state: StateVector, gate: GateOp, theta=None, x=None) -> StateVector:
    """Return a new state with ``gate`` applied; ``theta``/``x`` bind its slots."""
    n = state.qubit_count
    for q in _gate_qubits(gate):
        if not 0 <= q < n:
            raise ContractError(f"qubit index {q} out of range for {n} qubits")
    psi = state.amplitudes.reshape((2,) * n).copy()
    if isinstance(gate, GeneralRotation):
        m = rotation_matrix(*(_bound(theta, s, "parameter") for s in gate.slots))
        psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [gate.qubit])), 0, gate.qubit)
    elif isinstance(gate, ControlledNot):
        sel = [slice(None)] * n
        sel[gate.control] = 1
        sub = psi[tuple(sel)]
        t = gate.target - (gate.target > gate.control)
        psi[tuple(sel)] = np.flip(sub, axis=t).copy()
    else:
        xv = _bound(x, gate.data_slot, "data")
        full = _full_angles(gate, n)
        psi = psi.reshape(-1) * np.exp(-1j * xv * full)
    return StateVector(psi.reshape(-1), n)


def expectation_z0(state: StateVector) -> float:
    half = state.amplitudes.shape[0] >> 1
    p = np.abs(state.amplitudes) ** 2
    return float(p[:half].sum() - p[half:].sum())


def _coerce(circuit: Circuit, theta, X):
    theta = np.ascontiguousarray(theta, dtype=float)
    if theta.ndim != 1 or theta.shape[0] != circuit.parameter_slot_count:
        raise ContractError(
            f"expected {circuit.parameter_slot_count} parameters, got shape {theta.shape}"
        )
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, circuit.data_slot_count) if circuit.data_slot_count else X.reshape(-1, 0)
    if X.ndim != 2 or X.shape[1] != circuit.data_slot_count:
        raise ContractError(f"expected data rows of length {circuit.data_slot_count}, got shape {X.shape}")
    return theta, np.ascontiguousarray(X)


def run(circuit: Circuit, theta, X) -> np.ndarray:
    """Final states, one row per data row of ``X``."""
    theta, X = _coerce(circuit, theta, X)
    ops, diag = circuit.program
    return kernels.forward(ops, diag, circuit.qubit_count, theta, X)


def evaluate_batch(circuit: Circuit, theta, X) -> np.ndarray:
    """``<Z_0>`` for every row of ``X`` (shape ``(B, data_slot_count)``)."""
    states = run(circuit, theta, X)
    return kernels.expval_z0(states, circuit.qubit_count)


def value_and_grad(circuit: Circuit, theta, X, weights=None):
    """Outputs ``f(x_b)`` and ``sum_b weights_b * df(x_b)/dtheta`` in one adjoint sweep."""
    theta, X = _coerce(circuit, theta, X)
    weights = np.ones(X.shape[0]) if weights is None else np.ascontiguousarray(weights, dtype=float)
    if weights.shape != (X.shape[0],):
        raise ContractError("one weight per data row required")
    ops, diag = circuit.program
    return kernels.adjoint(ops, diag, circuit.qubit_count, theta, X, weights)


def gradient(circuit: Circuit, theta, x) -> np.ndarray:
    """Exact gradient of ``<Z_0>`` w.r.t. all parameter slots at a single input ``x``."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return value_and_grad(circuit, theta, x)[1]


def parameter_shift_gradient(circuit: Circuit, theta, x) -> np.ndarray:
    """Reference gradient from the two-term shift rule (one slot at a time)."""
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float).reshape(1, -1)
    grad = np.empty_like(theta)
    for k in range(theta.shape[0]):
        plus, minus = theta.copy(), theta.copy()
        plus[k] += np.pi / 2
        minus[k] -= np.pi / 2
        grad[k] = 0.5 * (evaluate_batch(circuit, plus, x)[0] - evaluate_batch(circuit, minus, x)[0])
    return grad


def dense_unitary(circuit: Circuit, theta, x) -> np.ndarray:
    """Explicit ``2**n x 2**n`` circuit matrix; a test oracle independent of the kernels."""
    n = circuit.qubit_count
    dim = 1 << n
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float).ravel()
    U = np.eye(dim, dtype=np.complex128)
    eye = np.eye(2)
    for g in circuit.gates:
        if isinstance(g, GeneralRotation):
            mats = [eye] * n
            mats[g.qubit] = rotation_matrix(*theta[list(g.slots)])
            G = mats[0]
            for m in mats[1:]:
                G = np.kron(G, m)
        elif isinstance(g, ControlledNot):
            G = np.zeros((dim, dim))
            for i in range(dim):
                j = i ^ (1 << (n - 1 - g.target)) if (i >> (n - 1 - g.control)) & 1 else i
                G[j, i] = 1.0
        else:
            G = np.diag(np.exp(-1j * x[g.data_slot] * _full_angles(g, n)))
        U = G @ U
    return U
