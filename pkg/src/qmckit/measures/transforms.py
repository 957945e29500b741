"""Variable transforms from the unit cube to target measures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BoundaryError, DomainError, FactorizationError, UsageError
from .densities import GaussianDensity, KumaraswamyDensity, UniformDensity, UnitCubeDensity
from .normal import norm_ppf


@dataclass(frozen=True)
class CovarianceFactor:
    """``cov = factor @ factor.T`` together with the mean it belongs to."""

    mean: np.ndarray
    factor: np.ndarray
    method: str

    @property
    def cov(self):
        return self.factor @ self.factor.T


def factorize(cov, method="pca"):
    """Factor a symmetric PSD covariance.

    ``pca`` sorts eigenvalues descending and makes the largest-magnitude entry
    of each eigenvector positive, so the factor is platform independent.
    Rank-deficient matrices are accepted by ``pca`` only.
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    if cov.shape[0] != cov.shape[1]:
        raise FactorizationError("covariance must be square")
    scale = max(float(np.max(np.abs(cov))), np.finfo(float).tiny)
    if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * scale):
        raise FactorizationError("covariance must be symmetric")
    if method == "cholesky":
        try:
            return np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise FactorizationError("covariance is not positive definite; cholesky failed") from None
    if method != "pca":
        raise UsageError(f"unknown factorization {method!r}")
    evals, evecs = np.linalg.eigh(cov)
    if evals.min() < -1e-10 * max(evals.max(), 0.0) - 1e-300:
        raise FactorizationError(f"covariance is not positive semi-definite (eigenvalue {evals.min():.3g})")
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    lead = np.argmax(np.abs(evecs), axis=0)
    signs = np.sign(evecs[lead, np.arange(evecs.shape[1])])
    evecs = evecs * np.where(signs == 0, 1.0, signs)
    return evecs * np.sqrt(evals)


class TransformStep:
    """One change of variables ``Psi_l : X_{l-1} -> X_l``.

    ``density`` is the density ``lambda_l`` the step's output mimics when its
    input follows ``input_density`` (``rho_l``).  For inverse-CDF steps the
    input density is uniform on the unit cube.
    """

    name = "step"
    domain = "unit_cube"
    codomain = "unit_cube"

    def __init__(self, d, density, input_density=None):
        self.d = int(d)
        self.density = density
        self.input_density = input_density if input_density is not None else UnitCubeDensity(self.d)

    def forward(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.forward(x)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} d={self.d}>"


def _check_cube(x, open_ends):
    x = np.asarray(x, dtype=np.float64)
    if open_ends:
        bad = (x <= 0.0) | (x >= 1.0) | np.isnan(x)
    else:
        bad = (x < 0.0) | (x > 1.0) | np.isnan(x)
    if bad.any():
        i = int(np.flatnonzero(bad.any(axis=1))[0])
        raise BoundaryError("input coordinate on or outside the unit-cube boundary", index=i)
    return x


class UniformStep(TransformStep):
    name = "uniform"
    codomain = "box"

    def __init__(self, a, b):
        a = np.asarray(a, dtype=np.float64).reshape(-1)
        b = np.asarray(b, dtype=np.float64).reshape(-1)
        if a.shape != b.shape:
            raise DomainError("bounds a and b must have the same length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise DomainError("uniform bounds must be finite")
        if np.any(a >= b):
            raise DomainError("uniform bounds need a < b componentwise")
        self.a, self.b = a, b
        super().__init__(a.size, UniformDensity(a, b))

    def forward(self, x):
        x = _check_cube(x, open_ends=False)
        return self.a + (self.b - self.a) * x

    def log_jacobian(self, x):
        return np.full(np.shape(x)[0], float(np.sum(np.log(self.b - self.a))))


class GaussianStep(TransformStep):
    """``t = a + A Phi^{-1}(x)`` with ``cov = A A^T``."""

    name = "gaussian"
    codomain = "real"

    def __init__(self, mean, cov, method="pca"):
        mean = np.asarray(mean, dtype=np.float64).reshape(-1)
        cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
        if cov.shape != (mean.size, mean.size):
            raise DomainError(f"covariance shape {cov.shape} does not match mean length {mean.size}")
        self.factor = CovarianceFactor(mean, factorize(cov, method), method)
        self.mean = mean
        self.cov = cov
        super().__init__(mean.size, GaussianDensity(mean, cov))

    @property
    def A(self):
        return self.factor.factor

    def forward(self, x):
        x = _check_cube(x, open_ends=True)
        return self.mean + norm_ppf(x) @ self.A.T


class KumaraswamyStep(TransformStep):
    """Componentwise inverse CDF ``(1 - (1-u)^{1/beta})^{1/alpha}``."""

    name = "kumaraswamy"

    def __init__(self, alpha, beta):
        density = KumaraswamyDensity(alpha, beta)
        self.alpha, self.beta = density.alpha, density.beta
        super().__init__(density.d, density)

    def forward(self, u):
        u = _check_cube(u, open_ends=False)
        # u = 1 goes through log1p(-1) = -inf and lands exactly on 1
        with np.errstate(divide="ignore"):
            return (-np.expm1(np.log1p(-u) / self.beta)) ** (1.0 / self.alpha)

    def cdf(self, t):
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return -np.expm1(self.beta * np.log1p(-(t**self.alpha)))


def uniform_transform(a, b):
    return UniformStep(a, b)


def gaussian_transform(a, Sigma, method="pca"):
    return GaussianStep(a, Sigma, method)


def brownian_covariance(tau, d):
    j = np.arange(1, d + 1)
    return (tau / d) * np.minimum.outer(j, j).astype(np.float64)


def brownian_motion(tau, d, drift=0.0, method="pca"):
    """Discrete Brownian motion at times ``tau/d, ..., tau``, optionally with drift."""
    if tau <= 0:
        raise DomainError("time horizon must be positive")
    if d < 1:
        raise DomainError("need at least one time step")
    mean = drift * (tau / d) * np.arange(1, d + 1, dtype=np.float64)
    step = GaussianStep(mean, brownian_covariance(tau, d), method)
    step.name = "brownian_motion" if drift == 0 else f"brownian_motion(drift={drift:g})"
    step.tau, step.drift = tau, drift
    return step


def kumaraswamy_transform(alpha, beta):
    return KumaraswamyStep(alpha, beta)


def lebesgue_tail_transform(d):
    """``Phi^{-1}`` applied componentwise; pair with a Lebesgue target so the
    ladder weight carries the Jacobian ``prod 1/phi(t_k)``."""
    step = GaussianStep(np.zeros(d), np.eye(d), "cholesky")
    step.name = "lebesgue_tail"
    return step
