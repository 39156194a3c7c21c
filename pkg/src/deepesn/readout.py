"""Linear readouts on a single layer's states.

``train_direct`` solves the least-squares problem in closed form;
``train_lms`` runs plain per-sample LMS from zero weights, sweeping the
samples in time order every epoch.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numba
import numpy as np

from . import numerics
from .errors import DimensionError, DivergenceError
from .reservoir import LayerStates

DIVERGENCE_MSE = 1e12


@dataclass
class Readout:
    weights: np.ndarray
    trained_on_layer: int
    method: str
    bias: bool = False

    def __post_init__(self):
        if self.method not in ("direct", "lms"):
            raise ValueError(f"unknown readout method {self.method!r}")


@dataclass(frozen=True)
class LmsParams:
    learning_rate: float = 0.01
    epochs: int = 5000

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass
class LossTrace:
    per_epoch_mse: np.ndarray

    def __len__(self):
        return len(self.per_epoch_mse)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "mse"])
            for i, v in enumerate(self.per_epoch_mse, start=1):
                w.writerow([i, f"{v:.12g}"])


def _features(s: LayerStates, bias: bool) -> np.ndarray:
    x = s.states
    if bias:
        x = np.vstack([x, np.ones((1, x.shape[1]))])
    return x


def _targets(targets, n_steps: int) -> np.ndarray:
    y = np.asarray(targets, dtype=np.float64)
    if y.ndim == 1:
        y = y[None, :]
    y = numerics.as_matrix(y, "targets")
    if y.shape[1] != n_steps:
        raise DimensionError(f"targets have {y.shape[1]} columns, states have {n_steps}")
    return y


def train_direct(s: LayerStates, targets, ridge: float = 0.0,
                 bias: bool = False) -> Readout:
    x = _features(s, bias)
    y = _targets(targets, s.n_steps)
    w = numerics.least_squares_solve(x, y, ridge)
    return Readout(w, s.layer_index, "direct", bias)


@numba.njit(cache=True)
def _lms_kernel(xt, y, w, eta, epochs, limit, trace):
    """In-place LMS over time-major samples ``xt`` (steps x features).

    Returns the number of completed epochs; stops early when an epoch MSE
    exceeds ``limit`` or turns non-finite.
    """
    nt, nf = xt.shape
    ny = y.shape[0]
    err = np.empty(ny)
    for ep in range(epochs):
        for t in range(nt):
            for o in range(ny):
                acc = 0.0
                for i in range(nf):
                    acc += w[o, i] * xt[t, i]
                err[o] = eta * (y[o, t] - acc)
            for o in range(ny):
                e = err[o]
                for i in range(nf):
                    w[o, i] += e * xt[t, i]
        sq = 0.0
        for t in range(nt):
            for o in range(ny):
                acc = 0.0
                for i in range(nf):
                    acc += w[o, i] * xt[t, i]
                d = y[o, t] - acc
                sq += d * d
        mse = sq / (nt * ny)
        trace[ep] = mse
        if not mse <= limit:
            return ep + 1
    return epochs


def train_lms(s: LayerStates, targets, params: LmsParams = LmsParams(),
              bias: bool = False) -> tuple[Readout, LossTrace]:
    """Per-sample LMS: ``W += eta * (y(t) - W x(t)) x(t)^T``, samples in order.

    Weights start at zero.  After each epoch the full-pass training MSE is
    recorded.  If it exceeds 1e12 (or overflows) training stops with
    :class:`DivergenceError`, which carries the partial trace and weights.
    """
    x = _features(s, bias)
    xt = np.ascontiguousarray(x.T)
    y = np.ascontiguousarray(_targets(targets, s.n_steps))
    w = np.zeros((y.shape[0], x.shape[0]))
    trace = np.zeros(params.epochs)
    done = _lms_kernel(xt, y, w, float(params.learning_rate), int(params.epochs),
                       DIVERGENCE_MSE, trace)
    if done < params.epochs or not trace[-1] <= DIVERGENCE_MSE:
        raise DivergenceError(
            f"LMS diverged at epoch {done} (mse={trace[done - 1]:.3g})",
            LossTrace(trace[:done].copy()), Readout(w, s.layer_index, "lms", bias))
    return Readout(w, s.layer_index, "lms", bias), LossTrace(trace)


def predict(r: Readout, s: LayerStates) -> np.ndarray:
    x = _features(s, r.bias)
    if r.weights.shape[1] != x.shape[0]:
        raise DimensionError(
            f"readout expects {r.weights.shape[1]} features, states give {x.shape[0]}")
    return r.weights @ x


def mse(pred, targets) -> float:
    """Mean squared error over all entries."""
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape:
        raise DimensionError(f"shape mismatch: {p.shape} vs {t.shape}")
    return float(np.mean((p - t) ** 2))
