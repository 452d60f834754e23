"""Strictly stable laws: parametrizations, exact variates, exact transforms.

The Levy-measure coefficients (c_minus, c_plus) are canonical. The sampler
parametrization (scale sigma, skewness beta) is derived once at construction:

    nu(dz) = c_plus z^(-1-alpha) dz on z > 0,  c_minus |z|^(-1-alpha) dz on z < 0

integrates to the characteristic exponent

    -sigma^alpha |lam|^alpha (1 - i beta sign(lam) tan(pi alpha / 2)),
    sigma^alpha = Gamma(1 - alpha) cos(pi alpha / 2) (c_minus + c_plus) / alpha,
    beta = (c_plus - c_minus) / (c_plus + c_minus),

for alpha != 1, and sigma = (pi / 2)(c_minus + c_plus) at alpha = 1. In the
symmetric case with c = alpha Gamma(alpha) sin(pi alpha / 2) kappa / pi this
gives sigma^alpha = kappa; for a subordinator with c_plus = alpha kappa /
Gamma(1 - alpha) it gives Laplace exponent kappa lam^alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .special import gamma, loggamma

# relative slack for the strict-stability relation c_plus = c_minus + b (1 - alpha)
_STRICT_RTOL = 1e-12


@dataclass(frozen=True)
class StableLaw:
    """A strictly stable law on the real line.

    For alpha < 2 the law is described by the Levy measure (c_minus, c_plus)
    and the Levy-Ito drift b; for alpha = 2 by the Gaussian scale a. kappa is
    only defined in the symmetric and subordinator branches.
    """

    alpha: float
    c_minus: float = 0.0
    c_plus: float = 0.0
    drift_b: float = 0.0
    gauss_scale_a: float = 0.0
    kappa: float | None = None
    scale: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        a = self.alpha
        if not (0.0 < a <= 2.0) or not math.isfinite(a):
            raise DomainError(f"alpha must lie in (0, 2], got {a}")
        if a == 2.0:
            if self.gauss_scale_a == 0.0 or not math.isfinite(self.gauss_scale_a):
                raise DomainError("alpha = 2 needs a nonzero Gaussian scale a (pure drift excluded)")
            object.__setattr__(self, "scale", abs(self.gauss_scale_a))
            object.__setattr__(self, "beta", 0.0)
            return
        cm, cp = self.c_minus, self.c_plus
        if cm < 0 or cp < 0:
            raise DomainError("c_minus and c_plus must be nonnegative")
        if cm + cp <= 0:
            raise DomainError("c_minus + c_plus must be positive (pure drift excluded)")
        if a == 1.0:
            if cm != cp:
                raise DomainError("alpha = 1 is restricted to the symmetric Levy measure c_minus = c_plus")
            sigma = 0.5 * math.pi * (cm + cp)
        else:
            expected = cm + self.drift_b * (1.0 - a)
            if abs(cp - expected) > _STRICT_RTOL * max(cp, cm, abs(expected)):
                raise DomainError("strict stability requires c_plus = c_minus + b (1 - alpha)")
            sigma = (gamma(1.0 - a) * math.cos(0.5 * math.pi * a) * (cm + cp) / a) ** (1.0 / a)
        object.__setattr__(self, "scale", float(sigma))
        object.__setattr__(self, "beta", (cp - cm) / (cp + cm))

    @property
    def is_gaussian(self):
        return self.alpha == 2.0

    @property
    def is_symmetric(self):
        return self.is_gaussian or (self.c_minus == self.c_plus and self.drift_b == 0.0)

    @property
    def is_subordinator_abs(self):
        """True when |Z| is a subordinator: alpha < 1 and a one-sided Levy measure."""
        return self.alpha < 1.0 and (self.c_minus == 0.0 or self.c_plus == 0.0)

    @property
    def jump_mass(self):
        """c_minus + c_plus."""
        return self.c_minus + self.c_plus

    def describe(self):
        return {
            "alpha": self.alpha,
            "c_minus": self.c_minus,
            "c_plus": self.c_plus,
            "drift_b": self.drift_b,
            "gauss_scale_a": self.gauss_scale_a,
            "kappa": self.kappa,
            "scale": self.scale,
            "beta": self.beta,
        }


@dataclass(frozen=True)
class SubordinatorLaw:
    """One-sided stable law with E[exp(-lam X)] = exp(-kappa lam^alpha)."""

    alpha: float
    kappa: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"subordinator index must lie in (0, 1), got {self.alpha}")
        if not self.kappa > 0:
            raise DomainError("Laplace constant must be positive")

    def laplace(self, lam):
        return np.exp(-self.kappa * np.asarray(lam, dtype=float) ** self.alpha)


def symmetric_coefficient(alpha):
    """c / kappa for the symmetric law: alpha Gamma(alpha) sin(pi alpha / 2) / pi."""
    return alpha * gamma(alpha) * math.sin(0.5 * math.pi * alpha) / math.pi


def kappa_from_cplus(alpha, c_plus):
    """Inverse of the symmetric coefficient map."""
    return c_plus / symmetric_coefficient(alpha)


def from_symmetric(alpha, kappa):
    """Symmetric law with E[exp(i lam Z_t)] = exp(-kappa t |lam|^alpha)."""
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if alpha == 2.0:
        return StableLaw(alpha=2.0, gauss_scale_a=math.sqrt(2.0 * kappa), kappa=kappa)
    c = symmetric_coefficient(alpha) * kappa
    return StableLaw(alpha=alpha, c_minus=c, c_plus=c, drift_b=0.0, kappa=kappa)


def from_subordinator(alpha, kappa):
    """Stable subordinator with E[exp(-lam Z_t)] = exp(-kappa t lam^alpha)."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"a stable subordinator needs alpha in (0, 1), got {alpha}")
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    c_plus = alpha / gamma(1.0 - alpha) * kappa
    return StableLaw(alpha=alpha, c_minus=0.0, c_plus=c_plus, drift_b=c_plus / (1.0 - alpha), kappa=kappa)


def from_levy_measure(alpha, c_minus, c_plus, drift_b=None):
    """Strictly stable law from its Levy measure.

    For alpha != 1 the drift is forced to (c_plus - c_minus) / (1 - alpha);
    passing an inconsistent `drift_b` is an error. At alpha = 1 the drift is
    free and c_minus must equal c_plus.
    """
    if not (0.0 < alpha < 2.0):
        raise DomainError(f"a Levy-measure law needs alpha in (0, 2), got {alpha}")
    if alpha == 1.0:
        return StableLaw(alpha=1.0, c_minus=c_minus, c_plus=c_plus, drift_b=drift_b or 0.0)
    b = (c_plus - c_minus) / (1.0 - alpha)
    if drift_b is not None and abs(drift_b - b) > _STRICT_RTOL * max(abs(b), 1.0):
        raise DomainError(f"strict stability fixes b = {b!r}, got {drift_b!r}")
    return StableLaw(alpha=alpha, c_minus=c_minus, c_plus=c_plus, drift_b=b)


def from_gaussian(a):
    """Z = a W for a standard Brownian motion W."""
    return StableLaw(alpha=2.0, gauss_scale_a=a, kappa=0.5 * a * a)


def sp_law(law, p):
    """Law of S^p_1, the sum of p-th powers of the absolute jumps on [0, 1].

    Index alpha / p, Laplace constant ((c_minus + c_plus) / alpha) Gamma(1 - alpha / p).
    """
    if law.is_gaussian:
        raise DomainError("S^p is only defined for alpha < 2")
    if not p > law.alpha:
        raise DomainError(f"S^p is finite only for p > alpha (p={p}, alpha={law.alpha})")
    index = law.alpha / p
    const = math.exp(math.log(law.jump_mass / law.alpha) + loggamma(1.0 - index))
    return SubordinatorLaw(alpha=index, kappa=const)


def _open_uniform(rng, size):
    # (0, 1]: avoids log(0) and sin(0) in the transforms below
    return 1.0 - rng.random(size)


def _cms_standard(alpha, beta, rng, size):
    """Chambers-Mallows-Stuck draw with characteristic exponent
    -|lam|^alpha (1 - i beta sign(lam) tan(pi alpha / 2)), alpha != 1."""
    v = math.pi * (_open_uniform(rng, size) - 0.5)
    w = rng.standard_exponential(size)
    if beta == 0.0:
        return (
            np.sin(alpha * v)
            / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
        )
    zeta = beta * math.tan(0.5 * math.pi * alpha)
    shift = math.atan(zeta) / alpha
    factor = (1.0 + zeta * zeta) ** (0.5 / alpha)
    av = alpha * (v + shift)
    return (
        factor
        * np.sin(av)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - av) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_stable(law, t=1.0, rng=None, size=None):
    """Exact draw(s) of Z_t. Returns a float when `size` is None."""
    if rng is None:
        raise ValueError("an explicit rng stream is required")
    if not t > 0:
        raise DomainError("duration t must be positive")
    n = 1 if size is None else size
    a = law.alpha
    if a == 2.0:
        out = law.gauss_scale_a * math.sqrt(t) * rng.standard_normal(n)
    elif a == 1.0:
        v = math.pi * (_open_uniform(rng, n) - 0.5)
        out = law.scale * t * np.tan(v) + law.drift_b * t
    else:
        out = law.scale * t ** (1.0 / a) * _cms_standard(a, law.beta, rng, n)
        if law.is_subordinator_abs:
            # beta = +-1 is one-sided in exact arithmetic; clip rounding debris
            out = np.maximum(out, 0.0) if law.beta > 0 else np.minimum(out, 0.0)
    return float(out[0]) if size is None else out


def sample_one_sided(alpha_prime, laplace_const, rng, size=None):
    """Draw X >= 0 with E[exp(-lam X)] = exp(-laplace_const lam^alpha_prime).

    Kanter's representation: with U uniform on (0, pi) and E standard exponential,
    sin(a U) / sin(U)^(1/a) * (sin((1-a) U) / E)^((1-a)/a) has Laplace
    transform exp(-lam^a).
    """
    a = alpha_prime
    if not (0.0 < a < 1.0):
        raise DomainError(f"one-sided stable index must lie in (0, 1), got {a}")
    if not laplace_const > 0:
        raise DomainError("Laplace constant must be positive")
    n = 1 if size is None else size
    u = math.pi * _open_uniform(rng, n)
    e = rng.standard_exponential(n)
    x = np.sin(a * u) / np.sin(u) ** (1.0 / a) * (np.sin((1.0 - a) * u) / e) ** ((1.0 - a) / a)
    x = laplace_const ** (1.0 / a) * x
    return float(x[0]) if size is None else x
