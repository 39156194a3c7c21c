"""Richness measures of a layer's collected states.

* average state entropy (ASE): time mean of a Parzen estimate of Renyi's
  quadratic entropy of the instantaneous unit activations;
* uncoupled dynamics (UD): number of leading singular directions needed to
  reach a share ``explained`` of the total singular-value mass;
* condition number: largest over smallest singular value.

The entropy kernel is the normalized Gaussian density, so entropies sit on
the usual differential-entropy scale (nats).  Using an unnormalized kernel
would shift every value by the same ``log(sqrt(2 pi) sigma)`` term only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import IllConditionedError
from .reservoir import LayerStates

SQRT_2PI = math.sqrt(2.0 * math.pi)
RANK_FLOOR = 1e-14
# relative slack when comparing cumulative relevance to the target share
_CUMSUM_SLACK = 1e-12
_BLOCK = 256


@dataclass(frozen=True)
class EntropyParams:
    shrink_factor: float = 0.3
    min_kernel_sigma: float = 1e-8

    def __post_init__(self):
        if not self.shrink_factor > 0:
            raise ValueError("shrink_factor must be positive")
        if not self.min_kernel_sigma > 0:
            raise ValueError("min_kernel_sigma must be positive")


@dataclass(frozen=True)
class RichnessReport:
    layer_index: int
    ase: float
    ud: int
    kappa: float
    log10_kappa: float


def _column_entropies(x: np.ndarray, params: EntropyParams) -> np.ndarray:
    """Entropy of every column of ``x`` (units x columns).

    Each column is sorted first and its spread is taken from pairwise
    differences (population variance = mean squared difference / 2), so the
    result depends only on the multiset of pairwise differences: permuting
    units gives bit-identical output.
    """
    n, t = x.shape
    out = np.empty(t)
    xs = np.sort(x, axis=0)
    for start in range(0, t, _BLOCK):
        blk = xs[:, start:start + _BLOCK]
        d2 = (blk[:, None, :] - blk[None, :, :]) ** 2
        var = d2.sum(axis=(0, 1)) / (2.0 * n * n)
        sigma = np.maximum(params.shrink_factor * np.sqrt(var), params.min_kernel_sigma)
        k = np.exp(-d2 / (2.0 * sigma * sigma)).sum(axis=(0, 1)) / (SQRT_2PI * sigma)
        out[start:start + blk.shape[1]] = -np.log(k / (n * n))
    return out


def instantaneous_entropy(x, params: EntropyParams = EntropyParams()) -> float:
    """Renyi quadratic entropy estimate of one state vector.

    ``-log(mean_ij K(x_j - x_i))`` over all ordered pairs including
    ``i == j``, with ``K`` a Gaussian density of standard deviation
    ``max(shrink_factor * std(x), min_kernel_sigma)``.
    """
    x = numerics.as_vector(x, "x")
    if x.shape[0] < 2:
        raise ValueError("entropy estimate needs at least 2 units")
    return float(_column_entropies(x[:, None], params)[0])


def average_state_entropy(s: LayerStates, params: EntropyParams = EntropyParams()) -> float:
    if s.units < 2:
        raise ValueError("entropy estimate needs at least 2 units")
    return float(np.mean(_column_entropies(s.states, params)))


def spectrum(s: LayerStates, centered: bool = False) -> np.ndarray:
    """Singular values of the state matrix, optionally after centering each unit.

    Always returns ``units`` values.  With fewer kept steps than units the
    trailing ``units - steps`` values are structurally zero.
    """
    x = s.states
    if centered:
        x = x - x.mean(axis=1, keepdims=True)
    if x.shape[0] <= x.shape[1]:
        return numerics.singular_values(x)
    sv = numerics.singular_values(x.T)
    return np.concatenate([sv, np.zeros(x.shape[0] - x.shape[1])])


def ud_from_spectrum(sv: np.ndarray, explained: float = 0.9) -> int:
    if not 0 < explained <= 1:
        raise ValueError(f"explained must be in (0, 1], got {explained}")
    total = sv.sum()
    if total == 0.0:
        raise ValueError("state matrix is all zeros; relevances are undefined")
    cum = np.cumsum(sv / total)
    hits = np.nonzero(cum >= explained - _CUMSUM_SLACK)[0]
    return int(hits[0]) + 1 if hits.size else int(sv.shape[0])


def kappa_from_spectrum(sv: np.ndarray) -> tuple[float, float]:
    top, bottom = float(sv[0]), float(sv[-1])
    if top == 0.0 or bottom < RANK_FLOOR * top:
        raise IllConditionedError(
            f"state matrix is rank deficient (sigma_min={bottom:.3g}, sigma_max={top:.3g})",
            sigma_max=top)
    kappa = top / bottom
    return kappa, math.log10(kappa)


def uncoupled_dynamics(s: LayerStates, explained: float = 0.9,
                       centered: bool = False) -> int:
    """Smallest ``d`` whose top-``d`` singular-value share reaches ``explained``.

    Uses the raw state matrix by default; ``centered=True`` subtracts each
    unit's time mean first.  Cumulative shares are compared with a 1e-12
    slack so ties such as ten equal values at 0.9 resolve to 9, not 10.
    """
    return ud_from_spectrum(spectrum(s, centered), explained)


def condition_number(s: LayerStates) -> tuple[float, float]:
    """``(kappa, log10(kappa))`` of the state matrix.

    Raises :class:`IllConditionedError` when the smallest singular value is
    under ``1e-14`` times the largest (rank deficient in double precision).
    """
    return kappa_from_spectrum(spectrum(s))


def richness(s: LayerStates, explained: float = 0.9,
             params: EntropyParams = EntropyParams()) -> RichnessReport:
    """All three measures for one layer; singular values computed once."""
    sv = spectrum(s)
    kappa, log_kappa = kappa_from_spectrum(sv)
    return RichnessReport(s.layer_index, average_state_entropy(s, params),
                          ud_from_spectrum(sv, explained), kappa, log_kappa)
