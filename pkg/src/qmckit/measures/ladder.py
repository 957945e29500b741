"""Composed variable transforms with density-ratio weights."""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..errors import UsageError, WeightError
from ..ld_core import PointBlock
from .densities import UnitCubeDensity


class TransformLadder:
    """``Psi = Psi_L o ... o Psi_1`` with target density ``target`` and base density ``base``.

    ``target=None`` means the final step's own density is the true measure, in
    which case its ratio cancels exactly.
    """

    def __init__(self, steps=(), target=None, base=None, d=None):
        self.steps = tuple(steps)
        if not self.steps and d is None:
            raise UsageError("an empty ladder needs an explicit dimension")
        self.d = self.steps[0].d if self.steps else int(d)
        self.base = base if base is not None else UnitCubeDensity(self.d)
        self.target = target
        prev = "unit_cube"
        for step in self.steps:
            if step.d != self.d:
                raise UsageError(f"step {step.name!r} has dimension {step.d}, ladder has {self.d}")
            if step.domain != prev:
                raise UsageError(f"step {step.name!r} expects {step.domain}, previous step yields {prev}")
            prev = step.codomain
        self.codomain = prev

    @property
    def true_density(self):
        if self.target is not None:
            return self.target
        return self.steps[-1].density if self.steps else self.base

    def with_target(self, target):
        return TransformLadder(self.steps, target, self.base, self.d)

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        chain = " -> ".join(s.name for s in self.steps) or "identity"
        return f"<TransformLadder {chain}; target={getattr(self.true_density, 'name', '?')}>"

    def apply(self, x):
        """Return ``(t, weights)`` for an ``(n, d)`` array of base points.

        weight = lambda(t)/rho(x) * prod_l rho_l(Psi_{l-1}(x)) / lambda_l(Psi_l(x))
        """
        x = np.asarray(x, dtype=np.float64)
        logw = -self.base.logpdf(x)
        cancels = bool(self.steps) and (self.target is None or self.target is self.steps[-1].density)
        path = x
        last = len(self.steps) - 1
        for l, step in enumerate(self.steps):
            logw += step.input_density.logpdf(path)
            path = step.forward(path)
            if cancels and l == last:
                break
            lam = step.density.logpdf(path)
            bad = np.isneginf(lam) | np.isnan(lam)
            if bad.any():
                raise WeightError(step.name, int(np.flatnonzero(bad)[0]))
            logw -= lam
        if not cancels:
            logw += self.true_density.logpdf(path)
        return path, np.exp(logw)


def ladder_transform(ladder, block):
    """Map a unit-cube block through the ladder; returns ``(block_t, weights)``."""
    values = block.values if isinstance(block, PointBlock) else np.asarray(block)
    t, w = ladder.apply(values)
    if isinstance(block, PointBlock):
        return replace(block, values=t, domain=ladder.codomain), w
    return t, w
