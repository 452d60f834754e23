"""Closed-form small-ball exponents, constants and bounds.

Everything is evaluated in log space: exponents such as 2p / (alpha (p - 2))
overflow double precision otherwise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .special import loggamma

PI2 = math.pi**2
CP_PRIME_DELTA = 1e-6
CP_PRIME_SCAN = 200
CP_PRIME_XTOL = 1e-10

BRANCH_SUBORDINATOR = "subordinator_p_gt_1"
BRANCH_P_LE_1 = "p_le_1"
BRANCH_GENERAL = "general"


def gamma_exponent(alpha, p, abs_subordinator=False):
    """Critical exponent: alpha / (1 - alpha) when |Z| is a subordinator and
    p > 1, else p alpha / (p - alpha)."""
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    if abs_subordinator and p > 1.0:
        if not alpha < 1.0:
            raise DomainError("|Z| can only be a subordinator for alpha < 1")
        return alpha / (1.0 - alpha)
    if not p > alpha:
        raise DomainError(f"p <= alpha (p={p}, alpha={alpha}): the p-variation is infinite")
    return p * alpha / (p - alpha)


def _log_kap(alpha, p, jump_mass):
    # log of ((p - alpha)/alpha) * ((jump_mass / p) Gamma(1 - alpha/p))^(p/(p - alpha))
    inner = math.log(jump_mass / p) + loggamma(1.0 - alpha / p)
    return math.log((p - alpha) / alpha) + p / (p - alpha) * inner


def _finite(log_value, what, factor=1.0):
    # exp(log_value) * factor, with overflow reported as a domain error
    try:
        value = factor * math.exp(log_value)
    except OverflowError:
        value = math.inf
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{what} diverges at these parameters")
    return value


def prop1_constant(law, p):
    """Exact small-ball constant when alpha < p <= 1, or when |Z| is a
    subordinator and p > 1."""
    a = law.alpha
    if law.is_subordinator_abs and p > 1.0:
        if not a < 1.0:
            raise DomainError("subordinator branch needs alpha < 1")
        if law.kappa is not None:
            # c_plus Gamma(1 - alpha) = alpha kappa, without the Gamma round trip
            log_inner = math.log(a * law.kappa)
        else:
            log_inner = math.log(max(law.c_minus, law.c_plus)) + loggamma(1.0 - a)
        return _finite(log_inner / (1.0 - a), "subordinator constant", 1.0 / a - 1.0)
    if a < p <= 1.0:
        return _finite(_log_kap(a, p, law.jump_mass), "small-ball constant")
    if p <= a:
        raise DomainError(f"p <= alpha (p={p}, alpha={a}): the p-variation is infinite")
    raise DomainError(
        f"no closed form for alpha={a}, p={p}: needs alpha < p <= 1 or a subordinator |Z| with p > 1"
    )


def lower_bound_kap(law, p):
    """Lower bound on the small-ball constant from the jumps alone, p > max(1, alpha)."""
    if law.is_gaussian:
        raise DomainError("the jump lower bound needs alpha < 2")
    if not p > max(1.0, law.alpha):
        raise DomainError(f"the jump lower bound needs p > max(1, alpha), got p={p}")
    return _finite(_log_kap(law.alpha, p, law.jump_mass), "jump lower bound")


def _check_sym(alpha, kappa):
    if not (0.0 < alpha < 2.0):
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    if not kappa > 0:
        raise DomainError("kappa must be positive")


def D_alpha_p(alpha, p, kappa):
    _check_sym(alpha, kappa)
    if not p > alpha:
        raise DomainError(f"p <= alpha (p={p}, alpha={alpha})")
    q = p / (p - alpha)
    inner = (
        math.log(2.0 * alpha / (p * math.pi))
        + loggamma(alpha)
        + math.log(math.sin(0.5 * math.pi * alpha))
        + loggamma(1.0 - alpha / p)
    )
    return _finite(math.log((p - alpha) / alpha) + q * inner + q * math.log(kappa), "D_alpha_p")


def d_alpha(alpha, kappa):
    _check_sym(alpha, kappa)
    r = 2.0 / (2.0 - alpha)
    return math.exp(math.log(1.0 - 0.5 * alpha) + alpha / (2.0 - alpha) * math.log(alpha) + r * math.log(kappa))


def max_formula(q, r, a, b):
    """max_{x > 0} (a x^q - b x^r) for 1 < q < r and a, b > 0."""
    if not (1.0 < q < r) or not (a > 0 and b > 0):
        raise DomainError("max_formula needs 1 < q < r and a, b > 0")
    log_val = r / (r - q) * math.log(q * a) + q / (q - r) * math.log(r * b)
    return (1.0 / q - 1.0 / r) * math.exp(log_val)


def _cp_prime_log_objective(alpha, p):
    # log of the Gamma ratio raised to 2p / (alpha (p - 2))
    ratio = loggamma(0.5 * (1.0 + alpha)) + loggamma(1.0 - alpha / p) - loggamma(0.5) - loggamma(1.0 - 0.5 * alpha)
    return 2.0 * p / (alpha * (p - 2.0)) * ratio


def cp_prime_argmax(p):
    """Maximizer over alpha in (0, 2) of the Gamma-ratio objective in cp_prime."""
    if not p > 2.0:
        raise DomainError(f"cp_prime needs p > 2, got {p}")
    lo, hi = CP_PRIME_DELTA, 2.0 - CP_PRIME_DELTA
    grid = np.linspace(lo, hi, CP_PRIME_SCAN)
    vals = np.array([_cp_prime_log_objective(a, p) for a in grid])
    k = int(np.argmax(vals))
    if k in (0, CP_PRIME_SCAN - 1):
        raise DomainError(f"cp_prime objective peaks at the boundary alpha={grid[k]}")
    res = minimize_scalar(
        lambda a: -_cp_prime_log_objective(a, p),
        bracket=(grid[k - 1], grid[k], grid[k + 1]),
        method="golden",
        tol=CP_PRIME_XTOL,
    )
    return float(res.x), float(-res.fun)


def cp_prime(p):
    """Lower bound on the Brownian (1/p)-Hoelder small-ball constant, p > 2."""
    _, log_max = cp_prime_argmax(p)
    log_pref = math.log((p - 2.0) / p) + 2.0 / (2.0 - p) * math.log(p) + (p + 2.0) / (p - 2.0) * math.log(2.0)
    return math.exp(log_pref + log_max)


def hoelder_comparison(p):
    """(1/4) Gamma(p / (p - 2)), the competing bound cp_prime stays below."""
    if not p > 2.0:
        raise DomainError("needs p > 2")
    return 0.25 * math.exp(loggamma(p / (p - 2.0)))


def gaussian_constants(kappa):
    """Brownian small-ball constants for Z = a W with kappa = a^2 / 2.

    Values scale with a^2 = 2 kappa; kappa = 1/2 is standard Brownian motion,
    giving pi^2/8 (sup), pi^2/2 (oscillation) and 1/8 (L2).
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    return {
        "kappa": kappa,
        "K_sup": PI2 / 8.0 * 2.0 * kappa,
        "K_osc": PI2 / 2.0 * 2.0 * kappa,
        "gamma_L2": kappa / 4.0,
        "K_sup_standard": PI2 / 8.0,
        "K_osc_standard": PI2 / 2.0,
        "gamma_L2_standard": 1.0 / 8.0,
        "normalization": "Z = a W with kappa = a^2/2; *_standard entries are for kappa = 1/2",
    }


@dataclass
class ConstantsReport:
    alpha: float
    p: float
    kappa: float | None
    branch: str
    gamma_exponent: float
    prop1_constant: float | None = None
    lower_bound_kap: float | None = None
    D_alpha_p: float | None = None
    d_alpha: float | None = None
    sup_upper: float | None = None
    osc_upper: float | None = None
    cp_prime: float | None = None
    cp_prime_argmax_alpha: float | None = None
    cp_interval: tuple | None = None
    upper_bound_K: float | None = None
    gaussian: dict | None = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def branch_of(law, p):
    if law.is_subordinator_abs and p > 1.0:
        return BRANCH_SUBORDINATOR
    if law.alpha < p <= 1.0:
        return BRANCH_P_LE_1
    return BRANCH_GENERAL


def constants_report(law, p, cp_upper=None):
    """Every constant that applies to (law, p), with the branch labeled."""
    a = law.alpha
    branch = branch_of(law, p)
    gamma = gamma_exponent(a, p, law.is_subordinator_abs)
    rep = ConstantsReport(alpha=a, p=p, kappa=law.kappa, branch=branch, gamma_exponent=gamma)
    if branch != BRANCH_GENERAL:
        rep.prop1_constant = prop1_constant(law, p)
    elif not law.is_gaussian:
        rep.lower_bound_kap = lower_bound_kap(law, p)
    else:
        rep.notes.append("alpha = 2: no closed-form constant; K(2, p) <= c_p")
    symmetric_jumps = not law.is_gaussian and law.is_symmetric and law.kappa is not None
    if symmetric_jumps:
        rep.D_alpha_p = D_alpha_p(a, p, law.kappa)
        rep.d_alpha = d_alpha(a, law.kappa)
        rep.sup_upper = PI2 / 8.0 + rep.d_alpha
        rep.osc_upper = PI2 / 2.0 + rep.d_alpha
    if p > 2.0:
        rep.cp_prime_argmax_alpha, _ = cp_prime_argmax(p)
        rep.cp_prime = cp_prime(p)
        rep.cp_interval = (rep.cp_prime, cp_upper)
        if cp_upper is not None and symmetric_jumps:
            rep.upper_bound_K = cp_upper + rep.d_alpha
        rep.notes.append("c_p itself is unknown; only the interval [cp_prime, user upper bound] is reported")
    if law.is_gaussian:
        rep.gaussian = gaussian_constants(law.kappa)
    if branch == BRANCH_GENERAL and symmetric_jumps:
        rep.notes.append("conjectured K = D_alpha_p for alpha < 2; not asserted")
    return rep
