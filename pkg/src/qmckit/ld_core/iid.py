"""Seeded IID uniform generator."""
from __future__ import annotations

import numpy as np

from ._types import PointBlock, Randomization


class IIDGenerator:
    """Stateful IID uniform sampler.

    Unlike the low-discrepancy generators, each call to :meth:`gen` returns
    fresh points.  Instances hold PRNG state and are meant for one owner.
    """

    family = "iid"
    ordering = "none"

    def __init__(self, d, seed=None):
        self.d = int(d)
        if seed is None:
            seed = int(np.random.SeedSequence().entropy) & (2**63 - 1)
        self.seed = int(seed)
        self.randomization = Randomization("none", self.seed)
        self._rng = np.random.default_rng(self.seed)
        self._drawn = 0

    def spawn(self, seed):
        return IIDGenerator(self.d, seed)

    def gen(self, n) -> PointBlock:
        if n < 0:
            raise ValueError("n must be non-negative")
        x = self._rng.random((n, self.d))
        start = self._drawn
        self._drawn += n
        return PointBlock(x, self.family, start, self._drawn, self.ordering, self.randomization)


def iid_points(d, n, seed):
    return IIDGenerator(d, seed).gen(n)
