"""Log-density evaluators used as true measures and importance-sampling densities."""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..errors import DomainError, FactorizationError


class LebesgueDensity:
    """Constant weight 1 on R^d (not a probability density)."""

    name = "lebesgue"
    is_pdf = False

    def __init__(self, d):
        self.d = int(d)

    def logpdf(self, t):
        return np.zeros(np.shape(t)[0])


class UnitCubeDensity:
    name = "uniform[0,1]"
    is_pdf = True

    def __init__(self, d):
        self.d = int(d)

    def logpdf(self, x):
        x = np.asarray(x)
        inside = np.all((x >= 0.0) & (x <= 1.0), axis=1)
        return np.where(inside, 0.0, -np.inf)


class UniformDensity:
    is_pdf = True

    def __init__(self, a, b):
        self.a = np.asarray(a, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.d = self.a.size
        self.name = "uniform"
        self._log_vol = float(np.sum(np.log(self.b - self.a)))

    def logpdf(self, t):
        t = np.asarray(t)
        inside = np.all((t >= self.a) & (t <= self.b), axis=1)
        return np.where(inside, -self._log_vol, -np.inf)


class GaussianDensity:
    """N(mean, cov); needs a positive-definite covariance to evaluate."""

    is_pdf = True

    def __init__(self, mean, cov):
        self.mean = np.asarray(mean, dtype=np.float64).reshape(-1)
        self.cov = np.asarray(cov, dtype=np.float64)
        self.d = self.mean.size
        self.name = "gaussian"
        self._chol = None

    def _factor(self):
        if self._chol is None:
            try:
                c, low = cho_factor(self.cov, lower=True)
            except np.linalg.LinAlgError:
                raise FactorizationError("covariance is singular; Gaussian density undefined") from None
            logdet = 2.0 * float(np.sum(np.log(np.diag(c))))
            self._chol = (c, low, logdet)
        return self._chol

    def logpdf(self, t):
        c, low, logdet = self._factor()
        r = np.asarray(t, dtype=np.float64) - self.mean
        sol = cho_solve((c, low), r.T).T
        quad = np.einsum("ij,ij->i", r, sol)
        return -0.5 * quad - 0.5 * logdet - self.d * 0.5 * math.log(2 * math.pi)


class KumaraswamyDensity:
    """Independent Kumaraswamy(alpha_k, beta_k) marginals on [0,1]^d."""

    is_pdf = True
    name = "kumaraswamy"

    def __init__(self, alpha, beta):
        self.alpha = np.asarray(alpha, dtype=np.float64).reshape(-1)
        self.beta = np.asarray(beta, dtype=np.float64).reshape(-1)
        if self.alpha.shape != self.beta.shape:
            raise DomainError("alpha and beta must have the same length")
        if np.any(self.alpha <= 0) or np.any(self.beta <= 0):
            raise DomainError("Kumaraswamy shape parameters must be positive")
        self.d = self.alpha.size

    def logpdf(self, t):
        t = np.asarray(t, dtype=np.float64)
        a, b = self.alpha, self.beta
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = t**a
            val = np.log(a * b) + (a - 1) * np.log(t) + (b - 1) * np.log1p(-ta)
        inside = (t >= 0) & (t <= 1)
        val = np.where(inside, val, -np.inf)
        val = np.where(np.isnan(val), -np.inf, val)
        return val.sum(axis=1)
