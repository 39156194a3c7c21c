"""Portable seedable random streams.

Every random draw in the package goes through :class:`Xoshiro256`, a
xoshiro256** generator seeded by splitmix64.  Both recurrences are fully
specified here so the streams can be reproduced in any language:

splitmix64 (state ``z``, all arithmetic mod 2**64)::

    z  = z + 0x9E3779B97F4A7C15
    r  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    r  = (r ^ (r >> 27)) * 0x94D049BB133111EB
    out = r ^ (r >> 31)

xoshiro256** (state ``s0..s3``)::

    out = rotl(s1 * 5, 7) * 9
    t   = s1 << 17
    s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
    s2 ^= t;  s3 = rotl(s3, 45)

The four state words are four consecutive splitmix64 outputs started from
the seed.  A double in [0, 1) is ``(out >> 11) * 2**-53``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> tuple[int, int]:
    """Advance a splitmix64 state; return ``(new_state, output)``."""
    z = (z + _GOLDEN) & MASK64
    r = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    r = ((r ^ (r >> 27)) * 0x94D049BB133111EB) & MASK64
    return z, r ^ (r >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    """Mix a seed with integer tags into an independent 64-bit seed.

    Used to give every (realization, layer, matrix role) its own substream,
    so adding layers or changing a scaling never shifts other draws.
    """
    _, h = splitmix64(seed & MASK64)
    for p in parts:
        _, h = splitmix64(h ^ ((p * _GOLDEN) & MASK64))
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** stream seeded through splitmix64."""

    def __init__(self, seed: int):
        z = seed & MASK64
        state = []
        for _ in range(4):
            z, out = splitmix64(z)
            state.append(out)
        self._s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        out = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return out

    def random(self) -> float:
        """One double uniform on [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        """Array of doubles uniform on [low, high), filled in C order."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape, dtype=np.int64))
        raw = np.fromiter((self.next_u64() >> 11 for _ in range(n)),
                          dtype=np.float64, count=n)
        unit = raw * (1.0 / (1 << 53))
        return (low + (high - low) * unit).reshape(shape)
