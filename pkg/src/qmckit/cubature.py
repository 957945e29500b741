"""Adaptive stopping criteria and the ``integrate`` driver."""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import UsageError
from .integrands import Problem, evaluate_f
from .ld_core import bit_reverse
from .measures.normal import norm_ppf

CHUNK = 2**18
CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget_exhausted"
CONE_SUSPECT = "cone_condition_suspect"


@dataclass(frozen=True)
class Tolerance:
    """Error target ``max(abs_tol, rel_tol * |estimate|)``."""

    abs_tol: float = 1e-2
    rel_tol: float = 0.0

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or max(self.abs_tol, self.rel_tol) <= 0:
            raise UsageError("need abs_tol >= 0, rel_tol >= 0 and at least one positive")

    def target(self, estimate):
        return max(self.abs_tol, self.rel_tol * abs(estimate))


@dataclass(frozen=True)
class CubatureResult:
    estimate: float
    n_total: int
    error_bound: float
    elapsed_seconds: float
    iterations: int
    status: str
    criterion: str
    flags: tuple = ()
    history: tuple = field(default=(), repr=False, compare=False)

    @property
    def converged(self):
        return self.status == CONVERGED

    def to_record(self, timing=True):
        return {
            "estimate": float(self.estimate),
            "n": int(self.n_total),
            "error_bound": float(self.error_bound),
            "time_sec": float(self.elapsed_seconds) if timing else 0.0,
            "criterion": self.criterion,
            "flags": [self.status, *self.flags],
        }

    def to_json(self, timing=True):
        """One-line JSON record; floats carry 17 significant digits."""
        rec = self.to_record(timing)
        parts = []
        for key, val in rec.items():
            if isinstance(val, float) and math.isfinite(val):
                parts.append(f'"{key}": {fmt(val)}')
            else:
                parts.append(f'"{key}": {json.dumps(val)}')
        return "{" + ", ".join(parts) + "}"

    CSV_HEADER = "estimate,n,error_bound,time_sec,criterion,flags"

    def to_csv_row(self, timing=True):
        rec = self.to_record(timing)
        return ",".join([fmt(rec["estimate"]), str(rec["n"]), fmt(rec["error_bound"]),
                         fmt(rec["time_sec"]), rec["criterion"], "|".join(rec["flags"])])


def fmt(x):
    """17 significant digits, enough to round-trip a double."""
    return f"{float(x):.17g}"


def _evaluate(problem, gen, n_start, n_end):
    out = np.empty(n_end - n_start)
    for a in range(n_start, n_end, CHUNK):
        b = min(a + CHUNK, n_end)
        out[a - n_start:b - n_start] = evaluate_f(problem, gen.gen(a, b).values)
    return out


def _require_family(gen, families, criterion):
    fam = getattr(gen, "family", None)
    if fam not in families:
        raise UsageError(f"criterion {criterion!r} needs a {' or '.join(families)} sampler, got {fam!r}")
    if getattr(gen, "d", None) is None:
        raise UsageError("sampler has no dimension")


def _m_limit(gen, m_max):
    return min(m_max, int(math.log2(gen.capacity)))


def fwht(y):
    """Normalized fast Walsh-Hadamard transform: ``c_k = (1/n) sum_i (-1)^{popcount(i & k)} y_i``."""
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    if n & (n - 1):
        raise ValueError("length must be a power of 2")
    h = 1
    while h < n:
        y = y.reshape(-1, 2, h)
        y = np.concatenate([y[:, 0] + y[:, 1], y[:, 0] - y[:, 1]], axis=1)
        h *= 2
    return y.reshape(-1) / n


def lattice_dft(y_natural):
    """DFT of values taken at natural-ordered lattice points, indexed by lattice wavenumber."""
    n = y_natural.size
    m = n.bit_length() - 1
    linear = y_natural[bit_reverse(np.arange(n), m).astype(np.int64)]
    return np.fft.fft(linear) / n


def _lattice_wavenumber(n):
    """Interleave conjugate frequencies: 0, 1, n-1, 2, n-2, ... -> 0, 1, 2, 3, 4, ..."""
    k = np.arange(n)
    w = np.where(k <= n // 2, 2 * k - 1, 2 * (n - k))
    w[0] = 0
    if n >= 2:
        w[n // 2] = n - 1
    return w


def block_sums(coef, m, wavenumber=None):
    """Sums of |coefficients| over dyadic wavenumber blocks ``[2^{l-1}, 2^l)``, ``l = 1..m``."""
    a = np.abs(coef)
    if wavenumber is not None:
        ordered = np.empty_like(a)
        ordered[wavenumber] = a
        a = ordered
    return np.array([a[2 ** (l - 1):2**l].sum() for l in range(1, m + 1)])


# Cone constant: ratio of the error to ``2^-m S_{m-4}`` sits below 5 for
# the vast majority of shifts on smooth test integrands.
CONE_CONSTANT = 5.0


def decay_bound(sums, m, inflate, block_len, cone=CONE_CONSTANT):
    """Error bound from the block ``block_len`` levels below the top, and a cone check.

    The top blocks are dominated by aliasing, so the reference is block
    ``m - block_len``; the aliased tail that forms the error then shrinks like
    ``2^-m``.  The check flags per-coefficient magnitudes that fail to decay
    over the ``block_len`` blocks preceding the reference.
    """
    ref = m - block_len
    bound = float(inflate * cone * 2.0**-m * sums[ref - 1])
    suspect = False
    low = ref - block_len
    if low >= 1:
        mean_ref = sums[ref - 1] / 2 ** (ref - 1)
        mean_low = sums[low - 1] / 2 ** (low - 1)
        suspect = bool(mean_ref > 0 and mean_ref >= mean_low)
    return bound, suspect


@dataclass(frozen=True)
class CubQMCReplications:
    """Independent randomizations; t-interval on the replicate means."""

    replications: int = 16
    m_min: int = 8
    m_max: int = 22
    confidence: float = 0.995
    name = "qmc-rep"
    families = ("lattice", "net", "halton")

    def run(self, problem, gen, tol):
        _require_family(gen, self.families, self.name)
        R = self.replications
        if R < 4:
            raise UsageError("need at least 4 replications")
        if gen.randomization.kind == "none":
            raise UsageError("replications need a randomized sampler")
        m_max = _m_limit(gen, self.m_max)
        if self.m_min > m_max:
            raise UsageError(f"m_min={self.m_min} exceeds supported m_max={m_max}")
        t0 = time.perf_counter()
        seeds = np.random.SeedSequence(gen.randomization.seed).generate_state(R, dtype=np.uint64)
        streams = [gen.spawn(int(s) & (2**63 - 1)) for s in seeds]
        quant = stats.t.ppf(self.confidence, R - 1)
        sums = [[] for _ in range(R)]
        n = 0
        history = []
        it = 0
        for m in range(self.m_min, m_max + 1):
            it += 1
            new_end = 2**m
            for r, g in enumerate(streams):
                sums[r].append(math.fsum(_evaluate(problem, g, n, new_end)))
            n = new_end
            means = np.array([math.fsum(s) / n for s in sums])
            estimate = math.fsum(means) / R
            spread = float(np.std(means, ddof=1)) if np.ptp(means) > 0 else 0.0
            bound = quant * spread / math.sqrt(R)
            history.append((R * n, estimate, bound))
            if bound <= tol.target(estimate):
                status = CONVERGED
                break
        else:
            status = BUDGET_EXHAUSTED
        return CubatureResult(estimate, R * n, bound, time.perf_counter() - t0, it, status, self.name,
                              history=tuple(history))


@dataclass(frozen=True)
class _CoeffDecay:
    m_min: int = 10
    m_max: int = 24
    inflate: float = 2.0
    block_len: int = 4

    def _transform(self, y):
        raise NotImplementedError

    def run(self, problem, gen, tol):
        _require_family(gen, self.families, self.name)
        if gen.ordering not in ("natural", "standard"):
            raise UsageError(f"{self.name} needs an extensible natural/standard ordering, got {gen.ordering!r}")
        if self.m_min <= self.block_len:
            raise UsageError("m_min must exceed block_len")
        m_max = _m_limit(gen, self.m_max)
        if self.m_min > m_max:
            raise UsageError(f"m_min={self.m_min} exceeds supported m_max={m_max}")
        t0 = time.perf_counter()
        y = np.empty(0)
        history = []
        flags = set()
        it = 0
        for m in range(self.m_min, m_max + 1):
            it += 1
            y = np.concatenate([y, _evaluate(problem, gen, y.size, 2**m)])
            coef, wave = self._transform(y)
            estimate = float(coef[0].real)
            sums = block_sums(coef, m, wave)
            bound, suspect = decay_bound(sums, m, self.inflate, self.block_len)
            history.append((y.size, estimate, bound))
            if bound <= tol.target(estimate):
                status = CONVERGED
                if suspect:
                    flags.add(CONE_SUSPECT)
                break
        else:
            status = BUDGET_EXHAUSTED
            if suspect:
                flags.add(CONE_SUSPECT)
        return CubatureResult(estimate, y.size, bound, time.perf_counter() - t0, it, status, self.name,
                              tuple(sorted(flags)), tuple(history))


@dataclass(frozen=True)
class CubQMCNetCoeffDecay(_CoeffDecay):
    """Doubling digital-net cubature, error from the decay of Walsh coefficients."""

    name = "qmc-net"
    families = ("net",)

    def _transform(self, y):
        return fwht(y), None


@dataclass(frozen=True)
class CubQMCLatticeCoeffDecay(_CoeffDecay):
    """Doubling shifted-lattice cubature, error from the decay of Fourier coefficients."""

    name = "qmc-lattice"
    families = ("lattice",)

    def _transform(self, y):
        return lattice_dft(y), _lattice_wavenumber(y.size)


@dataclass(frozen=True)
class CubMCCLT:
    """Two-stage IID Monte Carlo: pilot variance, then a CLT-sized fresh sample."""

    n_pilot: int = 1024
    inflate: float = 1.2
    confidence: float = 0.99
    n_max: int = 2**31
    name = "mc-clt"
    families = ("iid",)

    @property
    def z(self):
        return float(norm_ppf(0.5 + self.confidence / 2))

    def run(self, problem, gen, tol):
        _require_family(gen, self.families, self.name)
        if self.n_pilot < 64:
            raise UsageError("n_pilot must be at least 64")
        t0 = time.perf_counter()
        pilot = evaluate_f(problem, gen.gen(self.n_pilot).values)
        mean = math.fsum(pilot) / pilot.size
        sigma = float(np.std(pilot, ddof=1)) if np.ptp(pilot) > 0 else 0.0
        if sigma == 0.0:
            return CubatureResult(mean, self.n_pilot, 0.0, time.perf_counter() - t0, 1, CONVERGED, self.name)
        target = tol.target(mean)
        need = math.ceil((self.z * self.inflate * sigma / target) ** 2)
        status = CONVERGED
        budget = self.n_max - self.n_pilot
        if need > budget:
            need, status = budget, BUDGET_EXHAUSTED
        parts = []
        left = need
        while left > 0:
            k = min(CHUNK * 4, left)
            parts.append(math.fsum(evaluate_f(problem, gen.gen(k).values)))
            left -= k
        estimate = math.fsum(parts) / need
        bound = target if status == CONVERGED else self.z * self.inflate * sigma / math.sqrt(need)
        return CubatureResult(estimate, self.n_pilot + need, bound, time.perf_counter() - t0, 2, status,
                              self.name)


CRITERIA = {
    "qmc-rep": CubQMCReplications,
    "qmc-net": CubQMCNetCoeffDecay,
    "qmc-lattice": CubQMCLatticeCoeffDecay,
    "mc-clt": CubMCCLT,
}

DEFAULT_FAMILY = {"qmc-rep": "lattice", "qmc-net": "net", "qmc-lattice": "lattice", "mc-clt": "iid"}


def make_criterion(name, **params):
    try:
        cls = CRITERIA[name]
    except KeyError:
        raise UsageError(f"unknown criterion {name!r}; choose from {sorted(CRITERIA)}") from None
    return cls(**{k: v for k, v in params.items() if v is not None})


def integrate(problem: Problem, sampler, criterion, tol: Tolerance | float = Tolerance()) -> CubatureResult:
    """Approximate ``mu`` for ``problem`` with ``sampler`` until ``criterion`` meets ``tol``."""
    if not isinstance(tol, Tolerance):
        tol = Tolerance(float(tol))
    if isinstance(criterion, str):
        criterion = make_criterion(criterion)
    if getattr(sampler, "d", None) != problem.d:
        raise UsageError(f"sampler dimension {getattr(sampler, 'd', None)} != problem dimension {problem.d}")
    return criterion.run(problem, sampler, tol)


def cub_qmc_replications(p, gen, tol, R=16, m_min=8, m_max=22):
    return integrate(p, gen, CubQMCReplications(R, m_min, m_max), tol)


def cub_qmc_net_coeff_decay(p, gen, tol, m_min=10, m_max=24, inflate=2.0, block_len=4):
    return integrate(p, gen, CubQMCNetCoeffDecay(m_min, m_max, inflate, block_len), tol)


def cub_qmc_lattice_coeff_decay(p, gen, tol, m_min=10, m_max=24, inflate=2.0, block_len=4):
    return integrate(p, gen, CubQMCLatticeCoeffDecay(m_min, m_max, inflate, block_len), tol)


def cub_mc_clt(p, gen, tol, n_pilot=1024, inflate=1.2, confidence=0.99):
    return integrate(p, gen, CubMCCLT(n_pilot, inflate, confidence), tol)
