"""Standard normal CDF, log-density and inverse CDF."""
import math

import numpy as np
from scipy.special import erfc, ndtri

_SQRT2 = math.sqrt(2.0)
LOG_SQRT2PI = 0.5 * math.log(2.0 * math.pi)


def norm_cdf(x):
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)


def norm_logpdf(x):
    x = np.asarray(x, dtype=np.float64)
    return -0.5 * x * x - LOG_SQRT2PI


def norm_ppf(p):
    """Inverse standard normal CDF.

    Accurate to a few ulp in relative terms over (0, 1), including the far
    tails.  0 and 1 map to -inf and +inf; values outside [0, 1] give nan.
    """
    return ndtri(np.asarray(p, dtype=np.float64))
