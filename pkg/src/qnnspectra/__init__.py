"""Frequency spectra, statevector training and benchmarks for Fourier-type QNNs.

Submodules: ``simulator``, ``encodings``, ``spectrum``, ``model``, ``training``,
``synthdata``, ``pipeline``, ``bench``. Kernel backend selection lives in
``qnnspectra.kernels`` (env ``QNNSPECTRA_BACKEND``).
"""
from .errors import (
    AliasingError, ArchitectureError, CapacityError, ConfigError, ContractError, DegeneracyError,
    DivergenceError, FormatError, QnnError, UnsupportedError,
)
from .model import ArchitectureSpec, build, init_params
from .spectrum import frequency_spectrum
from .training import TrainConfig, train

__version__ = "0.1.0"

__all__ = [
    "ArchitectureSpec", "build", "init_params", "frequency_spectrum", "TrainConfig", "train",
    "QnnError", "ContractError", "CapacityError", "ArchitectureError", "AliasingError",
    "UnsupportedError", "DivergenceError", "FormatError", "DegeneracyError", "ConfigError",
]
