"""Seeded random streams.

Every run owns a handful of independent streams, one per purpose, derived
from ``(seed, run_id, purpose)`` with :class:`numpy.random.SeedSequence`
spawn keys on a PCG64 bit generator:

    stream(seed, run, purpose) = PCG64(SeedSequence(seed, spawn_key=(run, purpose)))

Separate streams keep the consumption order of one purpose independent of
the others, which is what lets the single-problem fast path draw a whole
run of answers at once and still match the round-by-round loop draw for
draw.
"""

from __future__ import annotations

from statistics import NormalDist

import numpy as np

ANSWERS = 0
TIES = 1
ALLOCATION = 2
ORDER = 3

_BLOCK = 2048
_STD_NORMAL = NormalDist()


class Stream:
    """Sequential source of uniforms in [0, 1).

    Draws are buffered in blocks, but the sequence handed out is the same as
    calling ``Generator.random()`` once per value, regardless of how scalar
    and vector requests are interleaved.
    """

    def __init__(self, generator: np.random.Generator):
        self._gen = generator
        self._buf: list[float] = []
        self._pos = 0

    @classmethod
    def for_run(cls, seed: int, run: int, purpose: int) -> "Stream":
        seq = np.random.SeedSequence(int(seed), spawn_key=(int(run), int(purpose)))
        return cls(np.random.Generator(np.random.PCG64(seq)))

    def random(self) -> float:
        if self._pos >= len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def randoms(self, k: int) -> np.ndarray:
        """Next ``k`` uniforms as an array."""
        rest = self._buf[self._pos:]
        if k <= len(rest):
            self._pos += k
            return np.asarray(rest[:k], dtype=float)
        self._buf, self._pos = [], 0
        fresh = self._gen.random(k - len(rest))
        return np.concatenate([np.asarray(rest, dtype=float), fresh])

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def shuffled(self, items) -> list:
        """Fisher-Yates shuffle of a copy of ``items`` (len - 1 draws)."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            k = int(self.random() * (i + 1))
            out[i], out[k] = out[k], out[i]
        return out

    def normal(self) -> float:
        """Standard normal by inversion; one draw."""
        u = self.random()
        if u <= 0.0:
            u = 5e-324
        return _STD_NORMAL.inv_cdf(u)
