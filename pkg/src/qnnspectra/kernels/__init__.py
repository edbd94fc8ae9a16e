"""Hot statevector kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from ``QNNSPECTRA_BACKEND``
(``numba`` or ``numpy``). ``numba`` is the default when importable.
"""
import importlib
import os

from .program import KIND_CNOT, KIND_DIAG, KIND_RY, KIND_RZ

BACKENDS = ("numba", "numpy")


def load(name):
    """Return the kernel module for ``name`` (``numba`` or ``numpy``)."""
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; expected one of {BACKENDS}")
    return importlib.import_module(f"{__name__}._{name}")


def _select():
    requested = os.environ.get("QNNSPECTRA_BACKEND", "").strip().lower()
    if requested:
        return requested, load(requested)
    try:
        return "numba", load("numba")
    except ImportError:
        return "numpy", load("numpy")


BACKEND, _impl = _select()
forward = _impl.forward
expval_z0 = _impl.expval_z0
adjoint = _impl.adjoint
# backend-native state layout; only pass these states back to the same backend
forward_native = _impl.forward_native
expval_native = _impl.expval_native
backward = _impl.backward

__all__ = [
    "BACKEND", "BACKENDS", "load", "forward", "expval_z0", "adjoint",
    "forward_native", "expval_native", "backward",
    "KIND_RZ", "KIND_RY", "KIND_CNOT", "KIND_DIAG",
]
