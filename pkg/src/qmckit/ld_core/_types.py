from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError

RANDOMIZATIONS = {
    "lattice": ("none", "shift_mod1"),
    "net": ("none", "digital_shift", "lms_with_digital_shift"),
    "halton": ("none", "digit_shift"),
    "iid": ("none",),
}

ORIGIN_WARNING = "unrandomized sequence: first point is the origin"


class UnrandomizedWarning(UserWarning):
    """Raised through :mod:`warnings` when an unrandomized block contains the origin."""


@dataclass(frozen=True)
class Randomization:
    kind: str = "none"
    seed: int = 0

    def check(self, family):
        allowed = RANDOMIZATIONS[family]
        if self.kind not in allowed:
            raise UsageError(f"randomization {self.kind!r} not valid for {family}; use one of {allowed}")


@dataclass
class PointBlock:
    """An ``n x d`` block of points plus the metadata needed to regenerate it."""

    values: np.ndarray
    family: str
    n_start: int
    n_end: int
    ordering: str = "natural"
    randomization: Randomization = field(default_factory=Randomization)
    domain: str = "unit_cube"
    warnings: tuple = ()

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def check_range(n_start, n_end, capacity, what):
    if n_start < 0 or n_end < n_start:
        raise UsageError(f"invalid index range [{n_start}, {n_end})")
    if n_end > capacity:
        from ..errors import CapacityError

        raise CapacityError(f"{what} supports at most {capacity} points, requested index {n_end}")


def seed_rng(seed, salt=0):
    """Seeded 64-bit PCG stream; ``salt`` separates independent uses of one seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), salt]))
