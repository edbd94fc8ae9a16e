"""Pure-numpy statevector kernels, vectorized over the sample axis.

States are ``(B, 2**n)`` complex arrays; qubit 0 is the most significant bit.
"""
import numpy as np

from .program import KIND_CNOT, KIND_RY, KIND_RZ


def _split(states, q, n):
    # (B, high, bit, low) view; bit is the q-th qubit
    return states.reshape(states.shape[0], 1 << q, 2, 1 << (n - 1 - q))


def _rz(states, q, n, angle):
    v = _split(states, q, n)
    v[:, :, 0, :] *= np.exp(-0.5j * angle)
    v[:, :, 1, :] *= np.exp(0.5j * angle)


def _ry(states, q, n, angle):
    v = _split(states, q, n)
    c, s = np.cos(0.5 * angle), np.sin(0.5 * angle)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = c * a0 - s * a1
    v[:, :, 1, :] = s * a0 + c * a1


def _cnot(states, c, t, n):
    v = states.reshape((states.shape[0],) + (2,) * n)
    i0 = [slice(None)] * (n + 1)
    i0[c + 1] = 1
    i1 = list(i0)
    i0[t + 1] = 0
    i1[t + 1] = 1
    i0, i1 = tuple(i0), tuple(i1)
    tmp = v[i0].copy()
    v[i0] = v[i1]
    v[i1] = tmp


def _apply(states, op, diag, n, theta, X, sign):
    kind, a, b, slot = op
    if kind == KIND_RZ:
        _rz(states, a, n, sign * theta[slot])
    elif kind == KIND_RY:
        _ry(states, a, n, sign * theta[slot])
    elif kind == KIND_CNOT:
        _cnot(states, a, b, n)
    else:
        states *= np.exp((-1j * sign) * X[:, slot, None] * diag[a][None, :])


def forward(ops, diag, n, theta, X):
    """Run the program on ``|0...0>`` for every row of ``X``."""
    states = np.zeros((X.shape[0], 1 << n), dtype=np.complex128)
    states[:, 0] = 1.0
    for op in ops:
        _apply(states, op, diag, n, theta, X, 1.0)
    return states


def z0_signs(n):
    s = np.ones(1 << n)
    s[1 << (n - 1):] = -1.0
    return s


def expval_z0(states, n):
    return (np.abs(states) ** 2) @ z0_signs(n)


def backward(ops, diag, n, theta, X, psi, weights):
    """Weighted gradient ``sum_b w_b df_b/dtheta`` from final states; ``psi`` is consumed."""
    lam = psi * z0_signs(n)[None, :] * weights[:, None]
    grad = np.zeros(theta.shape[0])
    for k in range(ops.shape[0] - 1, -1, -1):
        op = ops[k]
        kind, q = op[0], op[1]
        if kind == KIND_RZ:
            vp = _split(psi, q, n)
            vl = _split(lam, q, n)
            z = np.vdot(vl[:, :, 0, :], vp[:, :, 0, :]) - np.vdot(vl[:, :, 1, :], vp[:, :, 1, :])
            grad[op[3]] += z.imag
        elif kind == KIND_RY:
            vp = _split(psi, q, n)
            vl = _split(lam, q, n)
            # <lam| Y |psi> with Y|0>=i|1>, Y|1>=-i|0>
            z = -1j * np.vdot(vl[:, :, 0, :], vp[:, :, 1, :]) + 1j * np.vdot(vl[:, :, 1, :], vp[:, :, 0, :])
            grad[op[3]] += z.imag
        _apply(psi, op, diag, n, theta, X, -1.0)
        _apply(lam, op, diag, n, theta, X, -1.0)
    return grad


forward_native = forward
expval_native = expval_z0


def adjoint(ops, diag, n, theta, X, weights):
    """Values f(x_b) and the weighted parameter gradient sum_b w_b df_b/dtheta."""
    psi = forward(ops, diag, n, theta, X)
    return expval_z0(psi, n), backward(ops, diag, n, theta, X, psi, weights)
