"""Experiment orchestration: learning-capability sweeps, classification runs,
metrics, and the config-driven suite runner that writes CSV reports."""
from __future__ import annotations

import csv
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np
from scipy.stats import rankdata

from . import spectrum
from .errors import ConfigError, ContractError, DivergenceError, QnnError
from .model import ANSATZ_MODES, ArchitectureSpec, build
from .synthdata import build_dataset, derive_seed, sample_target
from .training import TrainConfig, predict, sigmoid, train

log = logging.getLogger(__name__)

PRESETS = {
    "desk": {"population": 10, "epochs": 800, "classification_epochs": 300, "points": 1000},
    "paper": {"population": 100, "epochs": 3000, "classification_epochs": 3000, "points": 4000},
}

RESULT_COLUMNS = [
    "family", "area", "R", "L", "K_or_dataset", "eta", "epochs", "seed",
    "final_loss", "accuracy", "precision", "recall", "f1", "roc_auc",
    "mu_K", "q25", "q75", "wall_time_s",
]


def fmt(value) -> str:
    """Shortest round-trip text for CSV cells; blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


# ---------------------------------------------------------------- regression


def truncation_floor(x, y, omega) -> float:
    """Least-squares residual MSE of ``y`` onto ``span{e^{iwx} : w in omega}`` on the grid."""
    x = np.asarray(x, dtype=float)
    freqs = sorted({abs(float(w)) for w in omega})
    cols = []
    for w in freqs:
        if w == 0:
            cols.append(np.ones_like(x))
        else:
            cols += [np.cos(w * x), np.sin(w * x)]
    basis = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    r = y - basis @ coef
    return float(np.mean(r * r))


@dataclass
class FunctionRun:
    index: int
    seed: int
    final_loss: float
    floor: float
    diverged: bool
    history: np.ndarray = field(repr=False)


@dataclass
class CapabilityResult:
    mu: float
    q25: float
    q75: float
    per_function: list

    @property
    def mean_history(self) -> np.ndarray:
        hs = [r.history for r in self.per_function]
        width = max(h.shape[0] for h in hs)
        padded = np.full((len(hs), width), np.nan)
        for i, h in enumerate(hs):
            padded[i, : h.shape[0]] = h
        return np.nanmean(padded, axis=0)


def _capability_one(args):
    spec, K, index, master_seed, config, points = args
    fseed = derive_seed(master_seed, "target", K, index)
    ds = build_dataset(sample_target(K, fseed), points)
    circuit = build(spec)
    omega = spectrum.frequency_spectrum(spec.family, spec.R, spec.L, with_degeneracy=False).omega
    floor = truncation_floor(ds.x, ds.y, omega.elements)
    cfg = replace(config, loss="mse", seed=derive_seed(master_seed, "init", K, index))
    try:
        res = train(circuit, ds.x.reshape(-1, 1), ds.y, cfg)
        return FunctionRun(index, fseed, res.final_loss, floor, False, res.loss_history)
    except DivergenceError as err:
        hist = getattr(err, "history", np.empty(0))
        finite = hist[np.isfinite(hist)]
        last = float(finite[-1]) if finite.size else float("nan")
        log.warning("function %d diverged at epoch %d", index, err.epoch)
        return FunctionRun(index, fseed, last, floor, True, hist)


def _map(fn, jobs, workers):
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def learning_capability(family, R, L, K, population=10, config: TrainConfig | None = None,
                        points=1000, master_seed=0, workers=1, entangling_depth=5) -> CapabilityResult:
    """Mean final MSE over ``population`` random degree-``K`` targets."""
    if population < 1:
        raise ContractError("population must be >= 1")
    spec = ArchitectureSpec(family, R, L, entangling_depth=entangling_depth)
    config = config or TrainConfig(epochs=800, learning_rate=0.05)
    jobs = [(spec, K, i, master_seed, config, points) for i in range(population)]
    runs = _map(_capability_one, jobs, workers)
    losses = np.array([r.final_loss for r in runs])
    q25, q75 = np.percentile(losses, [25, 75])
    return CapabilityResult(float(np.mean(losses)), float(q25), float(q75), runs)


# ------------------------------------------------------------ classification


class RocAucUndefined(ContractError):
    """ROC-AUC needs both classes; the other metrics are on ``.metrics``."""

    def __init__(self, metrics):
        super().__init__("ROC-AUC is undefined when only one class is present")
        self.metrics = metrics


def roc_auc(labels, scores) -> float:
    """Probability that a random positive outscores a random negative (ties count 1/2)."""
    y = np.asarray(labels).astype(int)
    s = np.asarray(scores, dtype=float)
    n_pos = int(y.sum())
    n_neg = y.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ContractError("ROC-AUC needs both classes")
    ranks = rankdata(s)
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def confusion(labels, predicted):
    y = np.asarray(labels).astype(int)
    p = np.asarray(predicted).astype(int)
    tp = int(np.sum((y == 1) & (p == 1)))
    fp = int(np.sum((y == 0) & (p == 1)))
    fn = int(np.sum((y == 1) & (p == 0)))
    tn = int(np.sum((y == 0) & (p == 0)))
    return tp, fp, fn, tn


def metrics_from_confusion(tp, fp, fn, tn) -> dict:
    total = tp + fp + fn + tn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"accuracy": (tp + tn) / total, "precision": precision, "recall": recall, "f1": f1}


def classification_metrics(labels, scores, threshold: float = 0.5) -> dict:
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=float)
    if y.shape != s.shape or y.size == 0:
        raise ContractError("labels and scores need equal non-empty shapes")
    if not np.all((y == 0) | (y == 1)):
        raise ContractError("labels must be 0 or 1")
    if np.any((s < 0) | (s > 1)):
        raise ContractError("scores must lie in [0, 1]")
    out = metrics_from_confusion(*confusion(y, s >= threshold))
    if np.unique(y).shape[0] < 2:
        out["roc_auc"] = None
        raise RocAucUndefined(out)
    out["roc_auc"] = roc_auc(y, s)
    return out


@dataclass
class ClassificationResult:
    metrics: dict
    final_loss: float
    loss_history: np.ndarray
    theta: np.ndarray
    test_scores: np.ndarray


def classify(spec: ArchitectureSpec, X_train, y_train, X_test, y_test, config: TrainConfig) -> ClassificationResult:
    circuit = build(spec)
    cfg = replace(config, loss="bce")
    res = train(circuit, X_train, y_train, cfg)
    scores = sigmoid(predict(circuit, res.theta_final, X_test), cfg.sigmoid_gain)
    try:
        metrics = classification_metrics(y_test, scores)
    except RocAucUndefined as err:
        metrics = err.metrics
    return ClassificationResult(metrics, res.final_loss, res.loss_history, res.theta_final, scores)


def read_feature_csv(path):
    """Features and labels from a ``train.csv``/``test.csv`` written by ``prep-nasa``."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"{path} has no rows")
    cols = [c for c in rows[0] if c != "label"]
    X = np.array([[float(r[c]) for c in cols] for r in rows])
    y = np.array([int(float(r["label"])) for r in rows])
    return X, y


# --------------------------------------------------------------------- suite

TOP_KEYS = {"task", "seed", "preset", "workers", "architecture", "training", "data"}
ARCH_KEYS = {"family", "shapes", "qubits", "layers", "features", "ansatz", "entangling_depth"}
TRAIN_KEYS = {"loss", "learning_rate", "epochs", "batch_size", "seeds", "seed", "sigmoid_gain"}
DATA_KEYS = {"K", "population", "points", "datasets"}


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _check_keys(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(unknown)}")


@dataclass(frozen=True)
class Cell:
    family: str
    R: int
    L: int
    target: object  # K for regression, dataset name for classification
    eta: float
    seed: int

    @property
    def coords(self):
        return (self.family, self.R, self.L, self.target, self.eta, self.seed)

    @property
    def slug(self):
        return f"{self.family}_R{self.R}_L{self.L}_{self.target}_eta{self.eta}_s{self.seed}"


@dataclass
class SuitePlan:
    task: str
    master_seed: int
    workers: int
    ansatz: str
    features: int
    entangling_depth: int
    train: TrainConfig
    population: int
    points: int
    datasets: dict
    cells: list


def load_config(path):
    import yaml

    with open(path) as fh:
        try:
            cfg = yaml.safe_load(fh)
        except yaml.YAMLError as err:
            raise ConfigError(f"{path}: {err}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return cfg


def plan_suite(cfg: dict, preset: str | None = None, seed=None, workers=None, base_dir=".") -> SuitePlan:
    """Validate a config tree and expand its grid into cells (sorted by coordinates)."""
    _check_keys(cfg, TOP_KEYS, "config")
    task = cfg.get("task", "regression")
    if task not in ("regression", "classification"):
        raise ConfigError(f"task must be regression or classification, got {task!r}")
    preset = preset or cfg.get("preset", "desk")
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
    defaults = PRESETS[preset]
    arch = cfg.get("architecture", {})
    tr = cfg.get("training", {})
    data = cfg.get("data", {})
    _check_keys(arch, ARCH_KEYS, "architecture")
    _check_keys(tr, TRAIN_KEYS, "training")
    _check_keys(data, DATA_KEYS, "data")

    families = [str(f).lower() for f in _as_list(arch.get("family", ["hamming"]))]
    from .encodings import FAMILIES

    bad = [f for f in families if f not in FAMILIES]
    if bad:
        raise ConfigError(f"unknown family {', '.join(bad)}; expected one of {', '.join(FAMILIES)}")
    if "shapes" in arch:
        shapes = [tuple(int(v) for v in s) for s in arch["shapes"]]
        if any(len(s) != 2 for s in shapes):
            raise ConfigError("architecture.shapes entries must be [qubits, layers]")
    else:
        shapes = list(product(map(int, _as_list(arch.get("qubits", 1))), map(int, _as_list(arch.get("layers", 1)))))
    ansatz = arch.get("ansatz", "univariate" if task == "regression" else "sequential")
    if ansatz not in ANSATZ_MODES:
        raise ConfigError(f"unknown ansatz {ansatz!r}")
    features = int(arch.get("features", 1))
    if task == "regression" and (ansatz != "univariate" or features != 1):
        raise ConfigError("regression suites use the univariate ansatz with one feature")

    loss = tr.get("loss", "mse" if task == "regression" else "bce")
    epochs = int(tr.get("epochs", defaults["epochs"] if task == "regression" else defaults["classification_epochs"]))
    batch = int(tr.get("batch_size", 0 if task == "regression" else 64))
    etas = [float(e) for e in _as_list(tr.get("learning_rate", 0.05 if task == "regression" else 0.005))]
    seeds = [int(s) for s in _as_list(tr.get("seeds", tr.get("seed", 0)))]
    try:
        train_cfg = TrainConfig(loss=loss, learning_rate=etas[0], epochs=epochs, batch_size=batch,
                                sigmoid_gain=float(tr.get("sigmoid_gain", 6.0)))
        for e in etas:
            TrainConfig(learning_rate=e)
    except ContractError as err:
        raise ConfigError(str(err)) from None

    datasets = {}
    if task == "regression":
        targets = [int(k) for k in _as_list(data.get("K", 4))]
    else:
        entries = data.get("datasets")
        if not entries:
            raise ConfigError("classification suites need data.datasets")
        for entry in entries:
            _check_keys(entry, {"name", "dir", "train", "test"}, "data.datasets[]")
            name = str(entry.get("name", ""))
            if not name:
                raise ConfigError("every dataset needs a name")
            d = os.path.join(base_dir, entry.get("dir", "."))
            datasets[name] = (
                os.path.join(d, entry.get("train", "train.csv")),
                os.path.join(d, entry.get("test", "test.csv")),
            )
        targets = list(datasets)
    master = int(seed if seed is not None else cfg.get("seed", 0))
    cells = [Cell(f, R, L, t, e, s) for f, (R, L), t, e, s in product(families, shapes, targets, etas, seeds)]
    cells.sort(key=lambda c: tuple(map(str, c.coords)))
    depth = int(arch.get("entangling_depth", 5))
    return SuitePlan(
        task=task, master_seed=master, workers=int(workers if workers is not None else cfg.get("workers", 1)),
        ansatz=ansatz, features=features, entangling_depth=depth, train=train_cfg,
        population=int(data.get("population", defaults["population"])),
        points=int(data.get("points", defaults["points"])),
        datasets=datasets, cells=cells,
    )


@dataclass
class ExperimentRecord:
    cell: Cell
    row: dict
    history: np.ndarray
    wall_time: float
    error: str | None = None


def run_cell(args) -> ExperimentRecord:
    plan, cell = args
    row = {k: None for k in RESULT_COLUMNS}
    row.update(family=cell.family, R=cell.R, L=cell.L, area=cell.R * cell.L, K_or_dataset=cell.target,
               eta=cell.eta, epochs=plan.train.epochs, seed=cell.seed)
    cell_seed = derive_seed(plan.master_seed, *cell.coords)
    cfg = replace(plan.train, learning_rate=cell.eta, seed=cell_seed)
    t0 = time.perf_counter()
    history = np.empty(0)
    try:
        if plan.task == "regression":
            res = learning_capability(
                cell.family, cell.R, cell.L, int(cell.target), plan.population, cfg, plan.points,
                master_seed=cell_seed, entangling_depth=plan.entangling_depth,
            )
            row.update(final_loss=res.mu, mu_K=res.mu, q25=res.q25, q75=res.q75)
            history = res.mean_history
        else:
            spec = ArchitectureSpec(cell.family, cell.R, cell.L, N=plan.features, ansatz_mode=plan.ansatz,
                                    entangling_depth=plan.entangling_depth)
            train_path, test_path = plan.datasets[cell.target]
            X_tr, y_tr = read_feature_csv(train_path)
            X_te, y_te = read_feature_csv(test_path)
            if X_tr.shape[1] != plan.features:
                raise ConfigError(f"{train_path} has {X_tr.shape[1]} features, config says {plan.features}")
            res = classify(spec, X_tr, y_tr, X_te, y_te, cfg)
            row.update(final_loss=res.final_loss, **res.metrics)
            history = res.loss_history
        error = None
    except (QnnError, OSError) as err:
        log.error("cell %s failed: %s", cell.slug, err)
        error = f"{type(err).__name__}: {err}"
    return ExperimentRecord(cell, row, history, time.perf_counter() - t0, error)


def run_suite(config_path, out_dir, preset=None, seed=None, workers=None, record_timing=False) -> dict:
    """Run every grid cell and write ``results.csv``, ``errors.csv`` and per-cell histories.

    ``wall_time_s`` stays blank unless ``record_timing`` is set, which keeps
    ``results.csv`` byte-identical across reruns.
    """
    cfg = load_config(config_path)
    plan = plan_suite(cfg, preset, seed, workers, base_dir=os.path.dirname(os.path.abspath(config_path)))
    records = _map(run_cell, [(plan, c) for c in plan.cells], plan.workers)
    os.makedirs(os.path.join(out_dir, "histories"), exist_ok=True)
    paths = {"results": os.path.join(out_dir, "results.csv"), "errors": os.path.join(out_dir, "errors.csv"),
             "histories": []}
    with open(paths["results"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for rec in records:
            if record_timing:
                rec.row["wall_time_s"] = rec.wall_time
            w.writerow([fmt(rec.row[c]) for c in RESULT_COLUMNS])
    with open(paths["errors"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "R", "L", "K_or_dataset", "eta", "seed", "error"])
        for rec in records:
            if rec.error:
                c = rec.cell
                w.writerow([c.family, c.R, c.L, c.target, fmt(c.eta), c.seed, rec.error])
    for rec in records:
        p = os.path.join(out_dir, "histories", rec.cell.slug + ".csv")
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "loss"])
            for e, v in enumerate(rec.history, 1):
                w.writerow([e, fmt(v)])
        paths["histories"].append(p)
    return paths
