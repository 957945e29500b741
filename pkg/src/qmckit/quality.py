"""Point-set diagnostics: discrepancy, stratification, moments and convergence orders."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError
from .integrands import Problem, evaluate_f
from .ld_core import PointBlock, make_generator

ROW_CHUNK = 512


def _values(block):
    x = block.values if isinstance(block, PointBlock) else np.asarray(block, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    return x


def centered_l2_discrepancy(block) -> float:
    """Centered L2 discrepancy of a point set in the unit cube.

    Parameters
    ----------
    block : PointBlock or array_like, shape (n, d)

    Returns
    -------
    float
        The discrepancy itself (not its square).

    Notes
    -----
    Evaluated with the exact closed form, so the cost is O(n^2 d).  The
    pairwise sum is accumulated over row chunks to bound memory.
    """
    x = _values(block)
    if isinstance(block, PointBlock) and block.domain != "unit_cube":
        raise DomainError(f"discrepancy needs unit-cube points, got domain {block.domain!r}")
    n, d = x.shape
    if n == 0:
        raise DomainError("discrepancy of an empty point set is undefined")
    if np.any((x < 0) | (x > 1)) or not np.all(np.isfinite(x)):
        raise DomainError("points must lie in [0, 1]^d")
    a = np.abs(x - 0.5)
    single = np.prod(1 + 0.5 * a - 0.5 * a**2, axis=1).sum()
    pair = 0.0
    for lo in range(0, n, ROW_CHUNK):
        xi, ai = x[lo:lo + ROW_CHUNK, None, :], a[lo:lo + ROW_CHUNK, None, :]
        k = 1 + 0.5 * ai + 0.5 * a[None] - 0.5 * np.abs(xi - x[None])
        pair += np.prod(k, axis=2).sum()
    cd2 = (13 / 12) ** d - 2 / n * single + pair / n**2
    return math.sqrt(max(cd2, 0.0))


def stratification_check(block, m: int) -> np.ndarray:
    """Per-dimension test that each dyadic cell of width ``2^-m`` holds one point."""
    x = _values(block)
    if m < 0 or x.shape[0] != 2**m:
        raise UsageError(f"stratification check needs exactly 2^{m} points, got {x.shape[0]}")
    cells = np.floor(x * 2**m).astype(np.int64)
    return np.array([np.array_equal(np.sort(c), np.arange(2**m)) for c in cells.T], dtype=bool)


def empirical_moments(block):
    """Sample mean vector and unbiased covariance matrix of a point block."""
    x = _values(block)
    if x.shape[0] < 2:
        raise DomainError("moments need at least two points")
    return x.mean(axis=0), np.atleast_2d(np.cov(x, rowvar=False))


@dataclass(frozen=True)
class SlopeReport:
    """RMSE against the exact value for each ``m`` and its log2-log2 fit."""

    family: str
    m_values: tuple
    rmse: tuple
    slope: float
    intercept: float
    seeds: int
    degenerate: bool = False

    def to_csv(self):
        lines = ["m,rmse"] + [f"{m},{r:.17g}" for m, r in zip(self.m_values, self.rmse)]
        return "\n".join(lines) + "\n"

    def to_json(self):
        rec = {
            "family": self.family, "m_values": [int(m) for m in self.m_values],
            "rmse": [float(r) for r in self.rmse], "slope": float(self.slope),
            "intercept": float(self.intercept), "seeds": int(self.seeds),
            "degenerate": bool(self.degenerate),
        }
        return json.dumps(rec)


def convergence_slope(problem: Problem, family: str, m_range, seeds: int = 20, seed0: int = 0) -> SlopeReport:
    """Fit the decay rate of the RMSE of ``2^m``-point sample means.

    Parameters
    ----------
    problem : Problem
        Must carry an exact value.
    family : str
        Sampler family; each seed ``seed0 + s`` gives one independent randomization.
    m_range : iterable of int
        At least three sample-size exponents.
    seeds : int
        Number of randomizations per ``m``.
    """
    if problem.exact is None:
        raise UsageError(f"problem {problem.name!r} has no exact value")
    ms = sorted(set(int(m) for m in m_range))
    if len(ms) < 3:
        raise UsageError("slope fit needs at least three m values")
    if seeds < 2:
        raise UsageError("need at least two seeds")
    sq = np.zeros(len(ms))
    for s in range(seeds):
        gen = make_generator(family, problem.d, seed=seed0 + s)
        if family == "iid":
            # fresh IID points per m keep the sample means independent across m
            means = [evaluate_f(problem, gen.gen(2**m)).mean() for m in ms]
        else:
            y = evaluate_f(problem, gen.gen(0, 2 ** ms[-1]))
            means = [y[:2**m].mean() for m in ms]
        sq += (np.array(means) - problem.exact) ** 2
    rmse = np.sqrt(sq / seeds)
    scale = max(abs(problem.exact), 1.0)
    if np.all(rmse <= 1e-13 * scale):
        return SlopeReport(family, tuple(ms), tuple(rmse), math.nan, math.nan, seeds, degenerate=True)
    slope, intercept = np.polyfit(ms, np.log2(np.maximum(rmse, np.finfo(float).tiny)), 1)
    return SlopeReport(family, tuple(ms), tuple(rmse), float(slope), float(intercept), seeds)


__all__ = [
    "SlopeReport", "centered_l2_discrepancy", "convergence_slope", "empirical_moments",
    "stratification_check",
]
