"""Numba-compiled statevector kernels.

States are stored basis-major, ``(2**n, B)``, so every gate sweeps the sample
axis in its innermost loop. Rotation coefficients are tabulated once per call.
The gradient is accumulated in one fixed sequential order, which keeps results
bit-identical between runs.
"""
import numpy as np
from numba import njit

from .program import KIND_CNOT, KIND_RY, KIND_RZ


@njit(cache=True)
def _apply(psi, ops, k, coef, inverse, diag, n, X):
    dim, B = psi.shape
    kind = ops[k, 0]
    a = ops[k, 1]
    col = 2 if inverse else 0
    if kind == KIND_RZ:
        mask = 1 << (n - 1 - a)
        ph0 = coef[k, col]
        ph1 = coef[k, col + 1]
        for i in range(dim):
            ph = ph1 if i & mask else ph0
            for b in range(B):
                psi[i, b] *= ph
    elif kind == KIND_RY:
        mask = 1 << (n - 1 - a)
        c = coef[k, col].real
        s = coef[k, col + 1].real
        for i in range(dim):
            if i & mask == 0:
                j = i | mask
                for b in range(B):
                    u0 = psi[i, b]
                    u1 = psi[j, b]
                    psi[i, b] = c * u0 - s * u1
                    psi[j, b] = s * u0 + c * u1
    elif kind == KIND_CNOT:
        cmask = 1 << (n - 1 - a)
        tmask = 1 << (n - 1 - ops[k, 2])
        for i in range(dim):
            if (i & cmask) and not (i & tmask):
                j = i | tmask
                for b in range(B):
                    tmp = psi[i, b]
                    psi[i, b] = psi[j, b]
                    psi[j, b] = tmp
    else:
        sgn = 1.0 if inverse else -1.0
        slot = ops[k, 3]
        row = diag[a]
        for i in range(dim):
            r = sgn * row[i]
            for b in range(B):
                ang = r * X[b, slot]
                psi[i, b] *= complex(np.cos(ang), np.sin(ang))

@njit(cache=True)
def _coefficients(ops, theta):
    coef = np.zeros((ops.shape[0], 4), dtype=np.complex128)
    for k in range(ops.shape[0]):
        kind = ops[k, 0]
        if kind == KIND_RZ:
            t = theta[ops[k, 3]]
            coef[k, 0] = np.exp(-0.5j * t)
            coef[k, 1] = np.exp(0.5j * t)
            coef[k, 2] = coef[k, 1]
            coef[k, 3] = coef[k, 0]
        elif kind == KIND_RY:
            t = theta[ops[k, 3]]
            coef[k, 0] = np.cos(0.5 * t)
            coef[k, 1] = np.sin(0.5 * t)
            coef[k, 2] = coef[k, 0]
            coef[k, 3] = -coef[k, 1]
    return coef

@njit(cache=True)
def _forward_t(ops, diag, n, theta, X):
    coef = _coefficients(ops, theta)
    psi = np.zeros((1 << n, X.shape[0]), dtype=np.complex128)
    psi[0, :] = 1.0
    for k in range(ops.shape[0]):
        _apply(psi, ops, k, coef, False, diag, n, X)
    return psi


def forward(ops, diag, n, theta, X):
    """Final states as ``(B, 2**n)``."""
    return np.ascontiguousarray(_forward_t(ops, diag, n, theta, X).T)


@njit(cache=True)
def expval_z0(states, n):
    B, dim = states.shape
    half = dim >> 1
    out = np.empty(B)
    for b in range(B):
        acc = 0.0
        for i in range(dim):
            p = states[b, i].real ** 2 + states[b, i].imag ** 2
            acc += p if i < half else -p
        out[b] = acc
    return out


@njit(cache=True)
def backward(ops, diag, n, theta, X, psi, weights):
    """Weighted gradient from native final states; ``psi`` is consumed."""
    B = X.shape[0]
    dim = 1 << n
    coef = _coefficients(ops, theta)
    half = dim >> 1
    lam = np.empty_like(psi)
    for i in range(dim):
        sg = 1.0 if i < half else -1.0
        for b in range(B):
            lam[i, b] = sg * weights[b] * psi[i, b]
    grad = np.zeros(theta.shape[0])
    for k in range(ops.shape[0] - 1, -1, -1):
        kind = ops[k, 0]
        if kind == KIND_RZ:
            mask = 1 << (n - 1 - ops[k, 1])
            z = 0.0
            for i in range(dim):
                sg = -1.0 if i & mask else 1.0
                for b in range(B):
                    z += sg * (lam[i, b].real * psi[i, b].imag - lam[i, b].imag * psi[i, b].real)
            grad[ops[k, 3]] += z
        elif kind == KIND_RY:
            mask = 1 << (n - 1 - ops[k, 1])
            z = 0.0
            for i in range(dim):
                if i & mask == 0:
                    j = i | mask
                    # Im<lam|Y|psi>
                    for b in range(B):
                        z -= lam[i, b].real * psi[j, b].real + lam[i, b].imag * psi[j, b].imag
                        z += lam[j, b].real * psi[i, b].real + lam[j, b].imag * psi[i, b].imag
            grad[ops[k, 3]] += z
        _apply(psi, ops, k, coef, True, diag, n, X)
        _apply(lam, ops, k, coef, True, diag, n, X)
    return grad


forward_native = _forward_t


@njit(cache=True)
def expval_native(psi, n):
    dim, B = psi.shape
    half = dim >> 1
    out = np.zeros(B)
    for i in range(dim):
        sg = 1.0 if i < half else -1.0
        for b in range(B):
            out[b] += sg * (psi[i, b].real ** 2 + psi[i, b].imag ** 2)
    return out


def adjoint(ops, diag, n, theta, X, weights):
    psi = _forward_t(ops, diag, n, theta, X)
    values = expval_native(psi, n)
    return values, backward(ops, diag, n, theta, X, psi, weights)
