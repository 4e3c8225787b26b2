"""Log-gamma and integer-order Bessel J, thin wrappers over scipy.special."""

import math

from scipy import special as _sp


def log_gamma(x):
    if not x > 0:
        raise ValueError(f"log_gamma needs x > 0, got {x!r}")
    return float(_sp.gammaln(x))


def bessel_j(n, x):
    n = int(n)
    return float(_sp.jv(n, x))


def normal_cdf(v):
    return float(_sp.ndtr(v))


def normal_logcdf(v):
    return float(_sp.log_ndtr(v))


def log_factorial(n):
    return math.lgamma(n + 1)
