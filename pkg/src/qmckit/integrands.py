"""Integration problems: an original integrand ``g`` paired with a transform ladder."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import DomainError, UsageError
from .ld_core import PointBlock
from .measures import (
    GaussianDensity,
    TransformLadder,
    brownian_covariance,
    brownian_motion,
    gaussian_transform,
    lebesgue_ladder,
)


@dataclass(frozen=True)
class Problem:
    """``mu = int g(t) lambda(t) dt`` rewritten as ``int_[0,1]^d f(x) dx``.

    ``f(x) = g(Psi(x)) * w(x)`` with ``w`` the ladder's density-ratio weight.
    ``exact`` is the known value of ``mu`` when one is available.
    """

    g: Callable[[np.ndarray], np.ndarray]
    ladder: TransformLadder
    d: int
    name: str = "custom"
    exact: float | None = None

    def f(self, x):
        return evaluate_f(self, x)


def evaluate_f(p: Problem, block) -> np.ndarray:
    x = block.values if isinstance(block, PointBlock) else np.asarray(block, dtype=np.float64)
    if isinstance(block, PointBlock) and block.domain != "unit_cube":
        raise UsageError(f"expected a unit_cube block, got {block.domain}")
    if x.ndim != 2 or x.shape[1] != p.d:
        raise UsageError(f"points must have shape (n, {p.d}), got {x.shape}")
    t, w = p.ladder.apply(x)
    y = np.asarray(p.g(t), dtype=np.float64).reshape(-1) * w
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise DomainError(f"{p.name}: non-finite integrand value at point index {i}")
    return y


@lru_cache(maxsize=None)
def keister_exact(d: int) -> float:
    """Keister integral by radial reduction: (2 pi^{d/2} / Gamma(d/2)) int_0^inf cos(r) e^{-r^2} r^{d-1} dr."""
    if d < 1:
        raise DomainError("dimension must be at least 1")
    val, _ = integrate.quad(lambda r: math.cos(r) * math.exp(-r * r) * r ** (d - 1),
                            0.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=500)
    return 2.0 * math.pi ** (d / 2) / special.gamma(d / 2) * val


def keister_density(d):
    return GaussianDensity(np.zeros(d), 0.5 * np.eye(d))


def keister_problem(d: int, ladder: TransformLadder | None = None) -> Problem:
    """Keister integrand ``pi^{d/2} cos(||t||)`` under N(0, I/2).

    A custom ``ladder`` acts as the sampler: its target is replaced by the
    N(0, I/2) density, so any valid ladder gives importance sampling.
    """
    if d < 1:
        raise DomainError("dimension must be at least 1")
    if ladder is None:
        ladder = TransformLadder([gaussian_transform(np.zeros(d), 0.5 * np.eye(d))])
    else:
        if ladder.d != d:
            raise UsageError(f"ladder dimension {ladder.d} != {d}")
        ladder = ladder.with_target(keister_density(d))
    c = math.pi ** (d / 2)

    def g(t):
        return c * np.cos(np.sqrt(np.einsum("ij,ij->i", t, t)))

    return Problem(g, ladder, d, "keister", keister_exact(d))


def keister_lebesgue_problem(d: int) -> Problem:
    """Keister integral against Lebesgue measure: ``g(t) = cos(||t||) exp(-t.t)``."""

    def g(t):
        r2 = np.einsum("ij,ij->i", t, t)
        return np.cos(np.sqrt(r2)) * np.exp(-r2)

    return Problem(g, lebesgue_ladder(d), d, "keister-lebesgue", keister_exact(d))


def asian_call_payoff(paths, S0, K, r, sigma, tau):
    """Discounted arithmetic-average call payoff from Brownian paths ``(n, d)``.

    Prices follow geometric Brownian motion; the time average uses the
    trapezoidal rule over ``S_0..S_d``.
    """
    n, d = paths.shape
    times = tau * np.arange(1, d + 1) / d
    S = S0 * np.exp((r - 0.5 * sigma**2) * times + sigma * paths)
    avg = (0.5 * S0 + S[:, :-1].sum(axis=1) + 0.5 * S[:, -1]) / d
    return np.maximum(avg - K, 0.0) * math.exp(-r * tau)


def asian_call_problem(S0=100.0, K=100.0, r=0.05, sigma=0.2, tau=1.0, d=16, drift=0.0,
                       method="pca") -> Problem:
    """Arithmetic-mean Asian call; a nonzero ``drift`` importance-samples the Brownian motion."""
    if S0 <= 0 or K < 0 or tau <= 0 or sigma < 0 or d < 1:
        raise DomainError("need S0 > 0, K >= 0, tau > 0, sigma >= 0, d >= 1")
    step = brownian_motion(tau, d, drift, method)
    target = None if drift == 0 else GaussianDensity(np.zeros(d), brownian_covariance(tau, d))
    ladder = TransformLadder([step], target=target)
    exact = None
    if sigma == 0:
        exact = float(asian_call_payoff(np.zeros((1, d)), S0, K, r, 0.0, tau)[0])

    def g(t):
        return asian_call_payoff(t, S0, K, r, sigma, tau)

    return Problem(g, ladder, d, "asian-call", exact)


def custom_problem(g, ladder: TransformLadder, d: int | None = None, name="custom", exact=None) -> Problem:
    if d is not None and d != ladder.d:
        raise UsageError(f"dimension {d} does not match ladder dimension {ladder.d}")
    return Problem(g, ladder, ladder.d, name, exact)
