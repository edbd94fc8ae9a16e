"""Losses and plain gradient-descent training for regression and classification."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ContractError, DivergenceError
from .model import init_params
from .simulator import Circuit, _coerce

LOSSES = ("mse", "bce")
PROB_CLAMP = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    loss: str = "mse"
    learning_rate: float = 0.05
    epochs: int = 3000
    batch_size: int = 0  # 0 = full batch
    seed: int = 0
    sigmoid_gain: float = 6.0

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ContractError(f"unknown loss {self.loss!r}; expected one of {LOSSES}")
        if not self.learning_rate > 0:
            raise ContractError(f"learning_rate must be > 0, got {self.learning_rate}")
        if int(self.epochs) < 1:
            raise ContractError(f"epochs must be >= 1, got {self.epochs}")
        if int(self.batch_size) < 0:
            raise ContractError(f"batch_size must be >= 0, got {self.batch_size}")


@dataclass
class TrainedModel:
    theta_final: np.ndarray
    loss_history: np.ndarray
    wall_time: float
    theta_init: np.ndarray = field(repr=False)
    final_loss: float = float("nan")


def mse(predictions, targets) -> float:
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(targets, dtype=float)
    if p.shape != t.shape or p.size == 0:
        raise ContractError(f"mse needs equal non-empty shapes, got {p.shape} and {t.shape}")
    return float(np.mean((p - t) ** 2))


def sigmoid(z, gain: float = 6.0):
    return 1.0 / (1.0 + np.exp(-gain * np.asarray(z, dtype=float)))


def _check_labels(y):
    y = np.asarray(y, dtype=float)
    if not np.all((y == 0) | (y == 1)):
        raise ContractError("labels must be 0 or 1")
    return y


def bce(z, labels, gain: float = 6.0) -> float:
    z = np.asarray(z, dtype=float)
    y = _check_labels(labels)
    if z.shape != y.shape or z.size == 0:
        raise ContractError(f"bce needs equal non-empty shapes, got {z.shape} and {y.shape}")
    p = np.clip(sigmoid(z, gain), PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def _loss_and_weights(f, y, config):
    """Batch loss and dLoss/df per sample."""
    B = f.shape[0]
    if config.loss == "mse":
        r = f - y
        return float(np.mean(r * r)), 2.0 * r / B
    p = sigmoid(f, config.sigmoid_gain)
    pc = np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)
    loss = float(-np.mean(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc)))
    return loss, config.sigmoid_gain * (p - y) / B


def loss_and_grad(circuit: Circuit, theta, X, y, config: TrainConfig):
    theta, X = _coerce(circuit, theta, X)
    y = np.asarray(y, dtype=float)
    ops, diag = circuit.program
    n = circuit.qubit_count
    psi = kernels.forward_native(ops, diag, n, theta, X)
    f = kernels.expval_native(psi, n)
    loss, w = _loss_and_weights(f, y, config)
    return loss, kernels.backward(ops, diag, n, theta, X, psi, np.ascontiguousarray(w))


def predict(circuit: Circuit, theta, X) -> np.ndarray:
    theta, X = _coerce(circuit, theta, X)
    ops, diag = circuit.program
    psi = kernels.forward_native(ops, diag, circuit.qubit_count, theta, X)
    return kernels.expval_native(psi, circuit.qubit_count)


def dataset_loss(circuit, theta, X, y, config) -> float:
    f = predict(circuit, theta, X)
    return mse(f, y) if config.loss == "mse" else bce(f, y, config.sigmoid_gain)


def train(circuit: Circuit, X, y, config: TrainConfig, theta0=None) -> TrainedModel:
    """Plain gradient descent; mini-batches are reshuffled every epoch."""
    theta_init_seq, shuffle_seq = np.random.SeedSequence(config.seed).spawn(2)
    if theta0 is None:
        theta0 = init_params(circuit, theta_init_seq)
    theta, X = _coerce(circuit, theta0, X)
    theta = theta.copy()
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] == 0 or y.shape[0] != X.shape[0]:
        raise ContractError(f"need a non-empty dataset with one target per row, got {X.shape[0]} rows, {y.shape[0]} targets")
    if config.loss == "bce":
        _check_labels(y)
    n = X.shape[0]
    bs = n if config.batch_size in (0, None) or config.batch_size >= n else int(config.batch_size)
    rng = np.random.default_rng(shuffle_seq)
    history = np.empty(int(config.epochs))
    t0 = time.perf_counter()
    try:
        _descend(circuit, theta, X, y, config, bs, rng, history)
    except DivergenceError as err:
        err.history = history[:err.epoch].copy()
        err.theta = theta.copy()
        raise
    final = dataset_loss(circuit, theta, X, y, config)
    if not np.isfinite(final):
        err = DivergenceError(int(config.epochs), final)
        err.history, err.theta = history, theta.copy()
        raise err
    return TrainedModel(
        theta_final=theta,
        loss_history=history,
        wall_time=time.perf_counter() - t0,
        theta_init=np.asarray(theta0, dtype=float).copy(),
        final_loss=final,
    )


def _descend(circuit, theta, X, y, config, bs, rng, history):
    n = X.shape[0]
    eta = float(config.learning_rate)
    for epoch in range(int(config.epochs)):
        if bs == n:
            loss, g = loss_and_grad(circuit, theta, X, y, config)
            if not np.isfinite(loss):
                raise DivergenceError(epoch, loss)
            theta -= eta * g
            history[epoch] = loss
            continue
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            loss, g = loss_and_grad(circuit, theta, X[idx], y[idx], config)
            if not np.isfinite(loss):
                raise DivergenceError(epoch, loss)
            theta -= eta * g
            losses.append(loss)
        history[epoch] = np.mean(losses)
