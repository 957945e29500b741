"""Base-2 digital sequences (Sobol' by default) with digital shift and linear matrix scrambling."""
from __future__ import annotations

import warnings

import numpy as np

from ..errors import UsageError
from ._types import ORIGIN_WARNING, PointBlock, Randomization, UnrandomizedWarning, check_range, seed_rng
from .io import NET_BITS, GeneratingMatrices, default_sobol_matrices

SHIFT_BITS = 53
_SPARE = np.uint64(SHIFT_BITS - NET_BITS)
_WORD = (1 << NET_BITS) - 1


def _parity(x):
    return np.bitwise_count(x) & np.uint64(1)


def linear_matrix_scramble(columns, rng):
    """Left-multiply each dimension's generating matrix by a random unit lower-triangular matrix over GF(2).

    ``columns`` has shape ``(d, m)``; row ``r`` of the scrambling matrix mixes
    output digit ``r`` with digits ``0..r-1`` (the more significant bits).
    """
    columns = np.asarray(columns, dtype=np.uint64)
    d = columns.shape[0]
    out = np.zeros_like(columns)
    for r in range(NET_BITS):
        above = _WORD ^ ((1 << (NET_BITS - r)) - 1)
        noise = rng.integers(0, 2**NET_BITS, size=(d, 1), dtype=np.uint64) & np.uint64(above)
        row = noise | np.uint64(1 << (NET_BITS - 1 - r))
        out |= _parity(row & columns) << np.uint64(NET_BITS - 1 - r)
    return out


def digital_points(columns, idx):
    """XOR of the columns selected by the bits of each index; 32-bit fixed point."""
    idx = np.asarray(idx, dtype=np.uint64)
    z = np.zeros((idx.size, columns.shape[0]), dtype=np.uint64)
    top = int(idx.max()).bit_length() if idx.size else 0
    for j in range(min(top, columns.shape[1])):
        sel = ((idx >> np.uint64(j)) & np.uint64(1)).astype(bool)
        z[sel] ^= columns[:, j]
    return z


class DigitalNet:
    """Digital sequence in base 2; standard or Gray-code ordering.

    Points carry 32 bits from the net. The digital shift is a 53-bit word, so
    randomized points also fill the low-order bits and never land on 0.
    """

    family = "net"

    def __init__(self, d, mats: GeneratingMatrices | None = None, ordering="standard",
                 randomize="lms_with_digital_shift", seed=None):
        if ordering not in ("standard", "gray"):
            raise UsageError(f"net ordering must be 'standard' or 'gray', got {ordering!r}")
        self.d = int(d)
        self.matrices = mats if mats is not None else default_sobol_matrices(self.d)
        self.m_max = self.matrices.m_max
        self.ordering = ordering
        if seed is None:
            seed = int(np.random.SeedSequence().entropy) & (2**63 - 1)
        self.randomization = Randomization(randomize, int(seed))
        self.randomization.check(self.family)
        cols = self.matrices.take(self.d)
        self._shift = None
        if randomize != "none":
            rng = seed_rng(self.randomization.seed, salt=2)
            if randomize == "lms_with_digital_shift":
                cols = linear_matrix_scramble(cols, rng)
            self._shift = rng.integers(0, 2**SHIFT_BITS, size=self.d, dtype=np.uint64)
        self.columns = cols

    @property
    def capacity(self):
        return 2**self.m_max

    def spawn(self, seed):
        return DigitalNet(self.d, self.matrices, self.ordering, self.randomization.kind, seed)

    def integers(self, n_start, n_end):
        """Unshifted 32-bit digit words for indices ``[n_start, n_end)``."""
        check_range(n_start, n_end, self.capacity, "digital net")
        idx = np.arange(n_start, n_end, dtype=np.uint64)
        if self.ordering == "gray":
            idx = idx ^ (idx >> np.uint64(1))
        return digital_points(self.columns, idx)

    def gen(self, n_start, n_end=None) -> PointBlock:
        if n_end is None:
            n_start, n_end = 0, n_start
        z = self.integers(n_start, n_end)
        flags = ()
        if self._shift is not None:
            x = ((z << _SPARE) ^ self._shift[None, :]).astype(np.float64) / 2.0**SHIFT_BITS
        else:
            x = z.astype(np.float64) / 2.0**NET_BITS
            flags = (ORIGIN_WARNING,)
            if n_start == 0 and n_end > 0:
                warnings.warn(ORIGIN_WARNING, UnrandomizedWarning, stacklevel=2)
        return PointBlock(x, self.family, n_start, n_end, self.ordering, self.randomization, warnings=flags)


def digital_net_points(mats, d, n_start, n_end, ordering="standard", rand=Randomization()):
    """Points ``[n_start, n_end)`` of the digital sequence with generating matrices ``mats``."""
    return DigitalNet(d, mats, ordering, rand.kind, rand.seed).gen(n_start, n_end)
