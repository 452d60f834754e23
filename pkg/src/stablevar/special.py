"""Special functions used by the constants and the exact oracles.

Gamma, log-Gamma and erfc come from scipy.special (Cephes, double precision);
the test suite checks them against mpmath at 1e-13 relative on (0, 20).
"""

import math

import numpy as np
from scipy import special as _sp


def gamma(x):
    return _sp.gamma(x)


def loggamma(x):
    """log|Gamma(x)|."""
    return _sp.gammaln(x)


def erfc(x):
    return _sp.erfc(x)


def levy_cdf(x, laplace_const=1.0):
    """CDF of the one-sided 1/2-stable law with Laplace transform exp(-C sqrt(lam)).

    For C = 1 this is erfc(1 / (2 sqrt(x))); general C rescales x by C**2.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = _sp.erfc(laplace_const / (2.0 * np.sqrt(x)))
    out = np.where(x > 0, out, 0.0)
    return out[()] if out.ndim == 0 else out


def brownian_sup_cdf(eps, terms=10, scale=1.0):
    """P[sup_{t<=1} |a W_t| <= eps] by the theta series, truncated at `terms`."""
    e = float(eps) / scale
    if e <= 0:
        return 0.0
    ks = np.arange(terms)
    odd = 2 * ks + 1
    series = ((-1.0) ** ks / odd) * np.exp(-(odd**2) * math.pi**2 / (8.0 * e * e))
    return float(4.0 / math.pi * math.fsum(series))
