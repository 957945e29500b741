"""Halton sequences with optional random digit shifts."""
from __future__ import annotations

import math
import warnings

import numpy as np

from ..errors import CapacityError, UsageError
from ._types import ORIGIN_WARNING, PointBlock, Randomization, UnrandomizedWarning, check_range, seed_rng

MAX_DIGITS = 48


def _first_primes(count):
    limit = 8000
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)[:count]


PRIMES = _first_primes(1000)


def digits_for_base(p):
    # p**K must stay below 2**52 so the integer numerator and p**K are exact doubles
    return min(MAX_DIGITS, int(52 / math.log2(p)))


class Halton:
    """Halton sequence; dimension ``j`` is the van der Corput sequence in the ``j``-th prime."""

    family = "halton"
    ordering = "natural"

    def __init__(self, d, randomize="digit_shift", seed=None):
        self.d = int(d)
        if self.d > PRIMES.size:
            raise CapacityError(f"Halton supports at most {PRIMES.size} dimensions, {d} requested")
        if self.d < 1:
            raise UsageError("dimension must be positive")
        if seed is None:
            seed = int(np.random.SeedSequence().entropy) & (2**63 - 1)
        self.randomization = Randomization(randomize, int(seed))
        self.randomization.check(self.family)
        self.bases = PRIMES[: self.d]
        self.n_digits = [digits_for_base(int(p)) for p in self.bases]
        self._shifts = None
        if randomize == "digit_shift":
            rng = seed_rng(self.randomization.seed, salt=3)
            self._shifts = [rng.integers(0, int(p), size=k) for p, k in zip(self.bases, self.n_digits)]

    @property
    def capacity(self):
        return min(int(p) ** k for p, k in zip(self.bases, self.n_digits))

    def spawn(self, seed):
        return Halton(self.d, self.randomization.kind, seed)

    def gen(self, n_start, n_end=None) -> PointBlock:
        if n_end is None:
            n_start, n_end = 0, n_start
        check_range(n_start, n_end, self.capacity, "Halton")
        idx = np.arange(n_start, n_end, dtype=np.int64)
        x = np.empty((idx.size, self.d))
        for j, (p, k) in enumerate(zip(self.bases, self.n_digits)):
            p = int(p)
            rest = idx.copy()
            num = np.zeros_like(idx)
            for digit in range(k):
                a = rest % p
                rest //= p
                if self._shifts is not None:
                    a = (a + self._shifts[j][digit]) % p
                num = num * p + a
            x[:, j] = num / float(p**k)
        flags = ()
        if self._shifts is None:
            flags = (ORIGIN_WARNING,)
            if n_start == 0 and n_end > 0:
                warnings.warn(ORIGIN_WARNING, UnrandomizedWarning, stacklevel=2)
        return PointBlock(x, self.family, n_start, n_end, self.ordering, self.randomization, warnings=flags)


def halton_points(d, n_start, n_end, rand=Randomization()):
    return Halton(d, rand.kind, rand.seed).gen(n_start, n_end)
