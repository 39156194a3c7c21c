"""Deep reservoir construction and state dynamics.

A stack of ``L`` fully connected tanh reservoirs: the external input drives
layer 1 only, and each layer above is driven by the current state of the
layer below::

    x1(t) = tanh(W_in u(t) + R1 x1(t-1))
    xl(t) = tanh(Wl x{l-1}(t) + Rl xl(t-1)),   l > 1

No bias terms and no leaky integration.  States start at zero.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import numerics
from .errors import DimensionError
from .rng import Xoshiro256, derive_seed

ROLE_INPUT = 1
ROLE_INTER = 2
ROLE_RECURRENT = 3

RESCALE_TOL = 1e-8
RESCALE_MAX_ITER = 1_000_000


@dataclass(frozen=True)
class ReservoirConfig:
    n_layers: int
    units: int
    input_dim: int = 1
    spectral_radius: float = 0.9
    input_scaling: float = 1.0
    interlayer_scaling: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("n_layers", "units", "input_dim"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("spectral_radius", "input_scaling", "interlayer_scaling"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class DeepReservoir:
    """Frozen weights of a deep reservoir.

    ``w_inter[i]`` feeds layer ``i + 1`` into layer ``i + 2`` (1-based layer
    numbers), so it has ``n_layers - 1`` entries; ``w_rec`` has one
    recurrent matrix per layer.
    """

    config: ReservoirConfig
    w_in: np.ndarray
    w_inter: tuple = ()
    w_rec: tuple = ()

    @property
    def n_layers(self) -> int:
        return self.config.n_layers

    @property
    def units(self) -> int:
        return self.config.units


@dataclass
class LayerStates:
    """Column-wise state matrix of one layer after washout.

    ``states`` has shape ``(units, t_total - washout)``; column ``k`` is the
    state at time step ``washout + k + 1``.
    """

    layer_index: int
    states: np.ndarray
    washout: int = 0
    t_total: int = field(default=-1)

    def __post_init__(self):
        self.states = numerics.as_matrix(self.states, "states")
        if self.t_total < 0:
            self.t_total = self.washout + self.states.shape[1]
        if self.t_total - self.washout != self.states.shape[1]:
            raise DimensionError(
                f"{self.states.shape[1]} columns kept but t_total - washout = "
                f"{self.t_total - self.washout}")

    @property
    def units(self) -> int:
        return self.states.shape[0]

    @property
    def n_steps(self) -> int:
        return self.states.shape[1]

    def columns(self, start: int, stop: int | None = None) -> "LayerStates":
        """States for kept columns ``start:stop``, as a new LayerStates."""
        sub = self.states[:, start:stop]
        return LayerStates(self.layer_index, sub, self.washout + start,
                           self.washout + start + sub.shape[1])


def _draw(seed: int, shape, layer: int, role: int, attempt: int) -> np.ndarray:
    stream = Xoshiro256(derive_seed(seed, layer, role, attempt))
    return stream.uniform(-1.0, 1.0, shape)


def _draw_scaled(seed, shape, layer, role, target, measure) -> np.ndarray:
    for attempt in range(2):
        raw = _draw(seed, shape, layer, role, attempt)
        size = measure(raw, tol=RESCALE_TOL, max_iter=RESCALE_MAX_ITER)
        if size > 0:
            return raw * (target / size)
    raise ArithmeticError(
        f"drawn matrix for layer {layer}, role {role} has zero scale twice")


def init_reservoir(config: ReservoirConfig) -> DeepReservoir:
    """Draw and rescale all weights of a deep reservoir.

    Entries are uniform on [-1, 1] from a substream keyed by
    ``(seed, layer, role)``; then ``w_in`` is scaled to 2-norm
    ``input_scaling``, each inter-layer matrix to 2-norm
    ``interlayer_scaling`` and each recurrent matrix to spectral radius
    ``spectral_radius``.  Because substreams are per matrix, layer-1 weights
    do not depend on ``n_layers`` or ``interlayer_scaling``.
    """
    c = config
    nr = c.units
    w_in = _draw_scaled(c.seed, (nr, c.input_dim), 1, ROLE_INPUT,
                        c.input_scaling, numerics.operator_norm_2)
    w_inter = tuple(
        _draw_scaled(c.seed, (nr, nr), layer, ROLE_INTER,
                     c.interlayer_scaling, numerics.operator_norm_2)
        for layer in range(2, c.n_layers + 1))
    w_rec = tuple(
        _draw_scaled(c.seed, (nr, nr), layer, ROLE_RECURRENT,
                     c.spectral_radius, numerics.spectral_radius)
        for layer in range(1, c.n_layers + 1))
    return DeepReservoir(c, w_in, w_inter, w_rec)


def step(res: DeepReservoir, u, prev: Sequence[np.ndarray]) -> list[np.ndarray]:
    """One time step of every layer; returns the new states bottom-up."""
    u = numerics.as_vector(u, "u")
    if u.shape[0] != res.config.input_dim:
        raise DimensionError(f"input has length {u.shape[0]}, expected {res.config.input_dim}")
    if len(prev) != res.n_layers:
        raise DimensionError(f"expected {res.n_layers} previous states, got {len(prev)}")
    for x in prev:
        if np.shape(x) != (res.units,):
            raise DimensionError(f"previous state has shape {np.shape(x)}, expected ({res.units},)")
    out = []
    below = None
    for layer in range(res.n_layers):
        drive = res.w_in @ u if layer == 0 else res.w_inter[layer - 1] @ below
        below = np.tanh(drive + res.w_rec[layer] @ prev[layer])
        out.append(below)
    return out


def run(res: DeepReservoir, inputs, washout: int = 0) -> list[LayerStates]:
    """Drive the reservoir from zero state and collect post-washout states.

    ``inputs`` is a sequence of ``T`` input vectors, or a 1-D array of
    scalars when ``input_dim == 1``.
    """
    u = np.asarray(inputs, dtype=np.float64)
    if u.ndim == 1:
        u = u[:, None]
    if u.ndim != 2 or u.shape[0] == 0:
        raise DimensionError("input sequence must be non-empty")
    if u.shape[1] != res.config.input_dim:
        raise DimensionError(f"inputs have dimension {u.shape[1]}, expected {res.config.input_dim}")
    if not np.all(np.isfinite(u)):
        raise ValueError("input sequence contains NaN or Inf")
    t_total = u.shape[0]
    if not 0 <= washout < t_total:
        raise ValueError(f"washout must be in [0, {t_total}), got {washout}")

    keep = t_total - washout
    collected = [np.empty((res.units, keep)) for _ in range(res.n_layers)]
    prev = [np.zeros(res.units) for _ in range(res.n_layers)]
    for t in range(t_total):
        below = None
        for layer in range(res.n_layers):
            drive = res.w_in @ u[t] if layer == 0 else res.w_inter[layer - 1] @ below
            below = np.tanh(drive + res.w_rec[layer] @ prev[layer])
            prev[layer] = below
            if t >= washout:
                collected[layer][:, t - washout] = below
    return [LayerStates(layer + 1, collected[layer], washout, t_total)
            for layer in range(res.n_layers)]


def dump_weights(res: DeepReservoir, directory) -> list[str]:
    """Write each weight matrix to its own row-major CSV file for debugging."""
    os.makedirs(directory, exist_ok=True)
    named = [("w_in.csv", res.w_in)]
    named += [(f"w_inter_{i + 2}.csv", w) for i, w in enumerate(res.w_inter)]
    named += [(f"w_rec_{i + 1}.csv", w) for i, w in enumerate(res.w_rec)]
    paths = []
    for name, w in named:
        path = os.path.join(directory, name)
        np.savetxt(path, w, delimiter=",", fmt="%.17g")
        paths.append(path)
    return paths
