"""Benchmark time series: NARMA-10 and the Santa Fe laser next-step task."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .rng import Xoshiro256

NARMA_MAX_ABS = 1e3
NARMA_ATTEMPTS = 10
LASER_SCALE = 0.01


@dataclass
class TimeSeriesTask:
    """Aligned scalar input/target series; the first ``train_len`` steps train."""

    name: str
    inputs: np.ndarray
    targets: np.ndarray
    train_len: int
    test_len: int = 0

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.inputs.shape != self.targets.shape or self.inputs.ndim != 1:
            raise ValueError("inputs and targets must be 1-D and of equal length")
        if self.train_len < 0 or self.test_len < 0:
            raise ValueError("train_len and test_len must be non-negative")
        if self.inputs.shape[0] < self.train_len + self.test_len:
            raise ValueError(
                f"series of length {self.inputs.shape[0]} is shorter than "
                f"train_len + test_len = {self.train_len + self.test_len}")
        if not (np.all(np.isfinite(self.inputs)) and np.all(np.isfinite(self.targets))):
            raise ValueError("task contains NaN or Inf")

    def __len__(self):
        return self.inputs.shape[0]

    def to_csv(self, path) -> None:
        """Write columns ``t,u,y_tg`` with 1-based ``t``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "u", "y_tg"])
            for t, (u, y) in enumerate(zip(self.inputs, self.targets), start=1):
                w.writerow([t, repr(float(u)), repr(float(y))])


@dataclass(frozen=True)
class NarmaParams:
    order: int = 10
    coefficients: tuple = (0.3, 0.05, 1.5, 0.1)
    input_low: float = 0.0
    input_high: float = 0.5


def _narma_targets(u: np.ndarray, p: NarmaParams) -> np.ndarray:
    a, b, c, d = p.coefficients
    n = p.order
    y = np.zeros(u.shape[0])
    # index k holds time step k + 1; steps <= 0 read as zero
    for k in range(u.shape[0]):
        y1 = y[k - 1] if k >= 1 else 0.0
        hist = float(np.sum(y[max(k - n, 0):k]))
        u_lag = u[k - n] if k >= n else 0.0
        u1 = u[k - 1] if k >= 1 else 0.0
        y[k] = a * y1 + b * y1 * hist + c * u_lag * u1 + d
        if not abs(y[k]) <= NARMA_MAX_ABS:
            return y[:k + 1]
    return y


def generate_narma10(length: int, seed: int, params: NarmaParams = NarmaParams(),
                     inputs=None, train_len: int | None = None,
                     test_len: int = 0) -> TimeSeriesTask:
    """NARMA system driven by i.i.d. uniform input.

    ``y(t) = a y(t-1) + b y(t-1) sum_{i=1..order} y(t-i) + c u(t-order) u(t-1) + d``
    with zero history before ``t = 1``.  ``inputs`` overrides the random
    drive.  If the target leaves ``[-1e3, 1e3]`` the series is redrawn from
    ``seed + 1``, ``seed + 2``, ... for up to 10 attempts in total.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    train_len = length - test_len if train_len is None else train_len
    attempts = 1 if inputs is not None else NARMA_ATTEMPTS
    for attempt in range(attempts):
        if inputs is not None:
            u = np.asarray(inputs, dtype=np.float64)
            if u.shape != (length,):
                raise ValueError(f"inputs must have shape ({length},)")
        else:
            stream = Xoshiro256((seed + attempt) % 2**64)
            u = stream.uniform(params.input_low, params.input_high, length)
        y = _narma_targets(u, params)
        if y.shape[0] == length:
            return TimeSeriesTask("narma10", u, y, train_len, test_len)
    raise ArithmeticError(f"NARMA series diverged in {attempts} attempt(s) from seed {seed}")


def load_laser(path, scale: float = LASER_SCALE, comma_separated: bool = False) -> np.ndarray:
    """Read a laser intensity file (one integer per line) and scale it.

    With ``comma_separated`` a line may carry several comma-separated samples.
    Blank lines are skipped.
    """
    values = []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                fields = line.split(",") if comma_separated else [line]
                for field in fields:
                    field = field.strip()
                    if not field:
                        continue
                    try:
                        v = float(field)
                    except ValueError:
                        raise ValueError(
                            f"{path}:{lineno}: not a number: {field!r}") from None
                    if not math.isfinite(v):
                        raise ValueError(f"{path}:{lineno}: non-finite value {field!r}")
                    values.append(v)
    except OSError as exc:
        raise OSError(f"cannot read laser file {path}: {exc}") from exc
    if not values:
        raise ValueError(f"laser file {path} contains no samples")
    return np.asarray(values) * scale


def save_series(path, values) -> None:
    """Write one sample per line; integral values are written as integers."""
    with open(path, "w") as fh:
        for v in np.asarray(values, dtype=np.float64):
            fh.write(f"{int(v)}\n" if float(v).is_integer() else f"{v!r}\n")


def next_step_task(series, train_len: int, test_len: int, name: str = "laser") -> TimeSeriesTask:
    """Inputs ``s[t]`` with targets ``s[t + 1]`` over ``train_len + test_len`` steps."""
    s = np.asarray(series, dtype=np.float64)
    need = train_len + test_len + 1
    if s.ndim != 1 or s.shape[0] < need:
        raise ValueError(
            f"next-step task needs at least {need} samples, got {s.shape[0]}")
    n = train_len + test_len
    return TimeSeriesTask(name, s[:n], s[1:n + 1], train_len, test_len)


def split(task: TimeSeriesTask):
    """``((train_u, train_y), (test_u, test_y))`` as contiguous slices.

    The test slice continues the training sequence; callers running a
    reservoir should drive it over both in one pass and slice the states.
    """
    tr, te = task.train_len, task.test_len
    return ((task.inputs[:tr], task.targets[:tr]),
            (task.inputs[tr:tr + te], task.targets[tr:tr + te]))
