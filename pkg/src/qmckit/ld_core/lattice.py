"""Rank-1 extensible lattices in base 2."""
from __future__ import annotations

import warnings

import numpy as np

from ..errors import UsageError
from ._types import ORIGIN_WARNING, PointBlock, Randomization, UnrandomizedWarning, check_range, seed_rng
from .io import LatticeGenVector, default_lattice_vector

FRAC_BITS = 53
_FRAC_MASK = np.uint64(2**FRAC_BITS - 1)


def bit_reverse(idx, bits):
    """Reverse the low ``bits`` bits of each unsigned index."""
    idx = np.asarray(idx, dtype=np.uint64)
    out = np.zeros_like(idx)
    for b in range(bits):
        out |= ((idx >> np.uint64(b)) & np.uint64(1)) << np.uint64(bits - 1 - b)
    return out


def _is_pow2(n):
    return n > 0 and n & (n - 1) == 0


class Lattice:
    """Shifted rank-1 lattice generator.

    Natural ordering emits point ``i`` as ``phi_2(i) * h mod 1``, so the first
    ``2^m`` points always form the ``2^m``-point lattice.  Linear ordering emits
    ``i * h / n mod 1`` for a fixed power-of-two ``n`` and is not extensible.
    """

    family = "lattice"

    def __init__(self, d, gen: LatticeGenVector | None = None, ordering="natural",
                 randomize="shift_mod1", seed=None, shift=None):
        if ordering not in ("natural", "linear"):
            raise UsageError(f"lattice ordering must be 'natural' or 'linear', got {ordering!r}")
        self.gen_vector = gen if gen is not None else default_lattice_vector()
        self.d = int(d)
        self.h = self.gen_vector.take(self.d)
        self.m_max = self.gen_vector.m_max
        self.ordering = ordering
        if seed is None:
            seed = int(np.random.SeedSequence().entropy) & (2**63 - 1)
        self.randomization = Randomization(randomize, int(seed))
        self.randomization.check(self.family)
        self._shift_float = None
        self._shift = None
        if shift is not None:
            if randomize != "shift_mod1":
                raise UsageError("an explicit shift requires randomize='shift_mod1'")
            shift = np.asarray(shift, dtype=np.float64).reshape(-1)
            if shift.size != self.d or np.any((shift < 0) | (shift >= 1)):
                raise UsageError("explicit shift must have d components in [0, 1)")
            self._shift_float = shift
        elif randomize == "shift_mod1":
            rng = seed_rng(self.randomization.seed, salt=1)
            self._shift = rng.integers(0, 2**FRAC_BITS, size=self.d, dtype=np.uint64)

    @property
    def capacity(self):
        return 2**self.m_max

    def spawn(self, seed):
        """Same lattice, independent random shift."""
        return Lattice(self.d, self.gen_vector, self.ordering, self.randomization.kind, seed)

    def _fixed_point(self, n_start, n_end):
        idx = np.arange(n_start, n_end, dtype=np.uint64)
        if self.ordering == "natural":
            bits = self.m_max
            k = bit_reverse(idx, bits)[:, None] * self.h[None, :]
        else:
            if not _is_pow2(n_end):
                raise UsageError(f"linear ordering needs n_end to be a power of 2, got {n_end}")
            bits = n_end.bit_length() - 1
            k = idx[:, None] * self.h[None, :]
        # uint64 products wrap mod 2^64, which is harmless for a mod 2^bits reduction
        k &= np.uint64(2**bits - 1)
        return k << np.uint64(FRAC_BITS - bits)

    def gen(self, n_start, n_end=None) -> PointBlock:
        if n_end is None:
            n_start, n_end = 0, n_start
        check_range(n_start, n_end, self.capacity, "lattice")
        z = self._fixed_point(n_start, n_end)
        flags = ()
        if self._shift is not None:
            x = ((z + self._shift[None, :]) & _FRAC_MASK).astype(np.float64) / 2.0**FRAC_BITS
        elif self._shift_float is not None:
            x = np.mod(z.astype(np.float64) / 2.0**FRAC_BITS + self._shift_float, 1.0)
        else:
            x = z.astype(np.float64) / 2.0**FRAC_BITS
            flags = (ORIGIN_WARNING,)
            if n_start == 0 and n_end > 0:
                warnings.warn(ORIGIN_WARNING, UnrandomizedWarning, stacklevel=2)
        return PointBlock(x, self.family, n_start, n_end, self.ordering, self.randomization, warnings=flags)


def lattice_points(gen, d, n_start, n_end, ordering="natural", rand=Randomization(), shift=None):
    """Points ``[n_start, n_end)`` of the rank-1 lattice generated by ``gen``."""
    lat = Lattice(d, gen, ordering, rand.kind, rand.seed, shift=shift)
    return lat.gen(n_start, n_end)
