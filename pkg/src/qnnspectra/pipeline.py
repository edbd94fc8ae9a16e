"""Vibration preprocessing: snapshot ingestion, RMS/Mahalanobis labeling,
stratified splitting, SMOTE, and the generic window/filter operations."""
from __future__ import annotations

import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from math import ceil, floor

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .errors import ContractError, DegeneracyError, FormatError

log = logging.getLogger(__name__)

TIMESTAMP_RE = re.compile(r"^(\d{4})\.(\d{2})\.(\d{2})\.(\d{2})\.(\d{2})\.(\d{2})$")


@dataclass
class SnapshotArchive:
    timestamps: list
    data: np.ndarray  # (snapshots, channels, samples)
    names: list = field(default_factory=list)

    @property
    def channel_count(self) -> int:
        return int(self.data.shape[1])

    def __len__(self):
        return int(self.data.shape[0])


def parse_timestamp(name: str) -> datetime:
    m = TIMESTAMP_RE.match(name)
    if m is None:
        raise FormatError(name, 0, "file name is not a YYYY.MM.DD.HH.MM.SS timestamp")
    return datetime(*map(int, m.groups()))


def _scan_for_error(path):
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            cells = line.split()
            if not cells:
                continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise FormatError(path, lineno, f"expected {width} columns, found {len(cells)}")
            for cell in cells:
                try:
                    float(cell)
                except ValueError:
                    raise FormatError(path, lineno, f"non-numeric cell {cell!r}") from None
    raise FormatError(path, 0, "unreadable snapshot file")


def load_snapshot_file(path) -> np.ndarray:
    """One snapshot as a ``(channels, samples)`` array."""
    try:
        arr = np.loadtxt(path, dtype=float, ndmin=2)
    except ValueError:
        _scan_for_error(path)
    if arr.size == 0:
        raise FormatError(path, 0, "empty snapshot file")
    return arr.T


def load_snapshots(directory, workers: int = 1) -> SnapshotArchive:
    names = sorted(
        (n for n in os.listdir(directory) if TIMESTAMP_RE.match(n)),
        key=parse_timestamp,
    )
    if not names:
        raise FormatError(directory, 0, "no timestamp-named snapshot files found")
    paths = [os.path.join(directory, n) for n in names]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            snaps = list(pool.map(load_snapshot_file, paths))
    else:
        snaps = [load_snapshot_file(p) for p in paths]
    shape = snaps[0].shape
    for p, s in zip(paths, snaps):
        if s.shape[0] != shape[0]:
            raise FormatError(p, 1, f"expected {shape[0]} channels, found {s.shape[0]}")
        if s.shape[1] != shape[1]:
            raise FormatError(p, s.shape[1], f"expected {shape[1]} samples, found {s.shape[1]}")
    stamps = [parse_timestamp(n) for n in names]
    if any(b <= a for a, b in zip(stamps, stamps[1:])):
        raise FormatError(directory, 0, "duplicate snapshot timestamps")
    return SnapshotArchive(stamps, np.stack(snaps), names)


def rms(signal, axis=None):
    x = np.asarray(signal, dtype=float)
    if x.size == 0:
        raise ContractError("rms of an empty signal")
    return np.sqrt(np.mean(x * x, axis=axis))


def rms_features(archive: SnapshotArchive) -> np.ndarray:
    """``(snapshots, channels)`` table of per-channel RMS."""
    return rms(archive.data, axis=2)


@dataclass(frozen=True)
class MahalanobisReference:
    mean: np.ndarray
    inv_cov: np.ndarray
    regularized: bool

    def distance(self, x) -> np.ndarray:
        d = np.atleast_2d(np.asarray(x, dtype=float)) - self.mean
        q = np.einsum("ij,jk,ik->i", d, self.inv_cov, d)
        out = np.sqrt(np.maximum(q, 0.0))
        return out if np.ndim(x) > 1 else float(out[0])


def fit_mahalanobis(reference, cond_limit: float = 1e12) -> MahalanobisReference:
    ref = np.atleast_2d(np.asarray(reference, dtype=float))
    n, d = ref.shape
    if n < d + 1:
        raise ContractError(f"need at least {d + 1} reference rows for dimension {d}, got {n}")
    mu = ref.mean(axis=0)
    S = np.cov(ref, rowvar=False).reshape(d, d)
    regularized = False
    if not np.isfinite(np.linalg.cond(S)) or np.linalg.cond(S) > cond_limit:
        S = S + 1e-9 * np.trace(S) / d * np.eye(d)
        regularized = True
        if not np.isfinite(np.linalg.cond(S)) or np.linalg.cond(S) > 1 / np.finfo(float).eps:
            raise DegeneracyError("reference covariance is singular even after regularization")
    return MahalanobisReference(mu, np.linalg.inv(S), regularized)


def mahalanobis(x, reference) -> float:
    return fit_mahalanobis(reference).distance(np.asarray(x, dtype=float))


def label_by_threshold(values, window: int, multiplier: float = 3.0):
    """Label ``values > mean + multiplier * std`` of the first ``window`` values."""
    v = np.asarray(values, dtype=float)
    if not 0 < window < v.shape[0]:
        raise ContractError(f"reference window {window} must be in [1, {v.shape[0] - 1}]")
    ref = v[:window]
    threshold = float(ref.mean() + multiplier * ref.std())
    return (v > threshold).astype(np.int64), threshold


def stratified_split(labels, test_fraction: float, seed):
    """Per-class shuffled split; each class sends ``round(count * fraction)`` rows to test."""
    y = np.asarray(labels)
    if not 0 < test_fraction < 1:
        raise ContractError(f"test_fraction must be in (0, 1), got {test_fraction}")
    classes = np.unique(y)
    if classes.shape[0] < 2:
        raise ContractError("stratified split needs both classes present")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in classes:
        idx = np.flatnonzero(y == c)
        idx = idx[rng.permutation(idx.shape[0])]
        k = int(floor(idx.shape[0] * test_fraction + 0.5))
        test.append(idx[:k])
        train.append(idx[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def smote(minority, k: int, target_count: int, seed) -> np.ndarray:
    """Synthetic minority rows ``x + u * (x_nn - x)`` until ``target_count`` rows exist."""
    X = np.atleast_2d(np.asarray(minority, dtype=float))
    m = X.shape[0]
    if m < 2:
        raise ContractError("SMOTE needs at least 2 minority rows")
    if not 1 <= k <= m - 1:
        raise ContractError(f"k must be in [1, {m - 1}], got {k}")
    need = int(target_count) - m
    if need < 0:
        raise ContractError(f"target count {target_count} is below the current {m}")
    if need == 0:
        return np.empty((0, X.shape[1]))
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    # stable sort breaks distance ties by lower row index
    neighbors = np.argsort(d2, axis=1, kind="stable")[:, :k]
    rng = np.random.default_rng(seed)
    base = rng.integers(0, m, size=need)
    pick = neighbors[base, rng.integers(0, k, size=need)]
    u = rng.random(need)[:, None]
    return X[base] + u * (X[pick] - X[base])


def sliding_window(series, window: int, stride: int) -> np.ndarray:
    x = np.asarray(series)
    if stride < 1:
        raise ContractError("stride must be >= 1")
    if not 1 <= window <= x.shape[0]:
        raise ContractError(f"window {window} longer than series of length {x.shape[0]}")
    return np.lib.stride_tricks.sliding_window_view(x, window, axis=0)[::stride]


def gaussian_smooth(series, sigma: float) -> np.ndarray:
    """Normalized Gaussian smoothing, radius ``ceil(4 sigma)``, reflect padding."""
    if not sigma > 0:
        raise ContractError(f"sigma must be > 0, got {sigma}")
    return gaussian_filter1d(
        np.asarray(series, dtype=float), sigma, mode="reflect", radius=int(ceil(4 * sigma))
    )


@dataclass
class PreparedBearingData:
    features: np.ndarray
    distances: np.ndarray
    labels: np.ndarray
    threshold: float
    train_idx: np.ndarray
    test_idx: np.ndarray
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    scaler: object
    mahalanobis_ref: MahalanobisReference
    smote_added: int


def prepare_bearing(features, ref_window=200, sigma_mult=3.0, test_fraction=0.2, seed=0, smote_k=5):
    """Label by Mahalanobis threshold, split, SMOTE the train split, scale to ``[-1, 1]``."""
    from .synthdata import derive_seed, minmax

    feats = np.asarray(features, dtype=float)
    if ref_window >= feats.shape[0]:
        raise ContractError(f"reference window {ref_window} must be shorter than {feats.shape[0]} rows")
    ref = fit_mahalanobis(feats[:ref_window])
    md = ref.distance(feats)
    labels, threshold = label_by_threshold(md, ref_window, sigma_mult)
    tr, te = stratified_split(labels, test_fraction, derive_seed(seed, "split"))
    X_tr, y_tr = feats[tr], labels[tr]
    counts = np.bincount(y_tr, minlength=2)
    minority = int(np.argmin(counts))
    added = 0
    if counts[minority] < counts[1 - minority]:
        rows = X_tr[y_tr == minority]
        k = min(smote_k, rows.shape[0] - 1)
        synth = smote(rows, k, counts[1 - minority], derive_seed(seed, "smote"))
        added = synth.shape[0]
        X_tr = np.vstack([X_tr, synth])
        y_tr = np.concatenate([y_tr, np.full(added, minority)])
    X_tr_s, scaler = minmax(X_tr, -1.0, 1.0)
    X_te_s = scaler.apply(feats[te])
    log.info("threshold %.4g, %d anomalous of %d, smote added %d", threshold, labels.sum(), labels.shape[0], added)
    return PreparedBearingData(
        feats, md, labels, threshold, tr, te, X_tr_s, y_tr, X_te_s, labels[te], scaler, ref, added
    )


def synthetic_run_to_failure(snapshots=20, channels=4, samples=256, failing_channel=2, onset=0.7, seed=0):
    """Small synthetic vibration archive whose ``failing_channel`` degrades after ``onset``.

    Used for fixtures and for exercising the pipeline without the public data set.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(samples) / samples
    data = np.empty((snapshots, channels, samples))
    for s in range(snapshots):
        life = s / max(snapshots - 1, 1)
        for c in range(channels):
            amp = 0.1 * (1 + 0.05 * c)
            if c == failing_channel and life > onset:
                amp *= 1 + 12 * (life - onset) / (1 - onset)
            data[s, c] = amp * np.sin(2 * np.pi * 33 * t + c) + 0.05 * rng.standard_normal(samples)
    return data


def write_snapshot_dir(directory, data, start=datetime(2004, 2, 12, 10, 32, 39), step_minutes=10):
    """Write ``(snapshots, channels, samples)`` data in the tab-separated archive layout."""
    from datetime import timedelta

    os.makedirs(directory, exist_ok=True)
    names = []
    for s in range(data.shape[0]):
        ts = start + timedelta(minutes=step_minutes * s)
        name = ts.strftime("%Y.%m.%d.%H.%M.%S")
        np.savetxt(os.path.join(directory, name), data[s].T, fmt="%.3f", delimiter="\t")
        names.append(name)
    return names
