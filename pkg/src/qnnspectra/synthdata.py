"""Random real Fourier-series targets, regression grids and min-max scaling."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError, ContractError


def derive_seed(master: int, *coords) -> int:
    """``master XOR hash(coords)`` with a hash that is stable across processes."""
    digest = hashlib.blake2b(repr(tuple(coords)).encode(), digest_size=8).digest()
    return (int(master) ^ int.from_bytes(digest, "little")) & (2 ** 64 - 1)


@dataclass(frozen=True, eq=False)
class TargetFunction:
    """``g(x) = c0 + sum_k 2 Re(c_k e^{ikx})``; ``coefficients[k]`` holds ``c_k`` for k = 0..K."""

    coefficients: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).ravel()
        if c.shape[0] < 2:
            raise ContractError("need at least c0 and c1")
        c = c.copy()
        c[0] = c[0].real
        object.__setattr__(self, "coefficients", c)

    @property
    def K(self) -> int:
        return self.coefficients.shape[0] - 1

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.arange(1, self.K + 1)
        waves = np.exp(1j * np.multiply.outer(x, k)) @ self.coefficients[1:]
        return self.coefficients[0].real + 2.0 * waves.real


def sample_target(K: int, seed: int) -> TargetFunction:
    """``c0 ~ U(-0.7, 0.7)``; ``Re c_k, Im c_k ~ N(0, 1)`` via numpy's PCG64 + ziggurat."""
    if K < 1:
        raise ContractError(f"K must be >= 1, got {K}")
    rng = np.random.default_rng(seed)
    c0 = rng.uniform(-0.7, 0.7)
    z = rng.standard_normal((K, 2))
    coeffs = np.concatenate([[c0], z[:, 0] + 1j * z[:, 1]])
    return TargetFunction(coeffs, seed)


@dataclass(frozen=True)
class MinMaxTransform:
    data_min: float | np.ndarray
    data_max: float | np.ndarray
    lo: float
    hi: float
    degenerate: bool | np.ndarray = False

    def apply(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        span = np.asarray(self.data_max - self.data_min, dtype=float)
        safe = np.where(span > 0, span, 1.0)
        scaled = self.lo + (values - self.data_min) * (self.hi - self.lo) / safe
        mid = 0.5 * (self.lo + self.hi)
        return np.where(span > 0, scaled, mid)

    def as_dict(self) -> dict:
        tolist = lambda v: np.asarray(v).tolist()
        return {
            "data_min": tolist(self.data_min),
            "data_max": tolist(self.data_max),
            "lo": self.lo,
            "hi": self.hi,
            "degenerate": tolist(self.degenerate),
        }


def minmax(values, lo: float = -1.0, hi: float = 1.0, fit=None, axis=0):
    """Affine map of ``values`` onto ``[lo, hi]``, fitted on ``fit`` (default: ``values``).

    Works column-wise for 2-D input. Degenerate (constant) columns map to the
    midpoint and are flagged in the returned transform.
    """
    if not hi > lo:
        raise ContractError(f"need hi > lo, got [{lo}, {hi}]")
    values = np.asarray(values, dtype=float)
    ref = values if fit is None else np.asarray(fit, dtype=float)
    dmin, dmax = ref.min(axis=axis), ref.max(axis=axis)
    degenerate = dmax - dmin <= 0
    if np.ndim(dmin) == 0:
        dmin, dmax, degenerate = float(dmin), float(dmax), bool(degenerate)
    tr = MinMaxTransform(dmin, dmax, float(lo), float(hi), degenerate)
    return tr.apply(values), tr


@dataclass(frozen=True, eq=False)
class RegressionDataset:
    x: np.ndarray
    y: np.ndarray
    target: TargetFunction = field(repr=False)
    transform: MinMaxTransform = field(repr=False)

    @property
    def raw_min(self) -> float:
        return self.transform.data_min

    @property
    def raw_max(self) -> float:
        return self.transform.data_max


def grid(points: int) -> np.ndarray:
    """``points`` equidistant samples of ``[0, 2*pi]``, both endpoints included."""
    return np.linspace(0.0, 2 * np.pi, points)


def build_dataset(g: TargetFunction, points: int = 4000, lo: float = -0.5, hi: float = 0.5) -> RegressionDataset:
    if points < 2 * g.K + 1:
        raise AliasingError(f"{points} points cannot resolve frequency {g.K}")
    x = grid(points)
    y, tr = minmax(g(x), lo, hi)
    return RegressionDataset(x, y, g, tr)
