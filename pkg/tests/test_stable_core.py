import math

import numpy as np
import pytest
from scipy import stats

from oracles import empirical_cf
from stablevar import (
    DomainError,
    StableLaw,
    SubordinatorLaw,
    from_gaussian,
    from_levy_measure,
    from_subordinator,
    from_symmetric,
    sample_one_sided,
    sample_stable,
    sp_law,
)
from stablevar.rng import stream
from stablevar.stable_core import kappa_from_cplus, symmetric_coefficient


def test_symmetric_coefficient_values():
    # alpha = 1: c = kappa / pi; alpha = 1/2: Gamma(3/2) sin(pi/4) / pi
    assert symmetric_coefficient(1.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert symmetric_coefficient(0.5) == pytest.approx(0.5 * math.sqrt(math.pi) * math.sqrt(0.5) / math.pi, rel=1e-14)
    assert kappa_from_cplus(1.3, symmetric_coefficient(1.3) * 2.5) == pytest.approx(2.5, rel=1e-14)


def test_symmetric_scale_equals_kappa():
    for a in (0.3, 0.7, 1.0, 1.5, 1.9):
        law = from_symmetric(a, 2.0)
        assert law.scale**a == pytest.approx(2.0, rel=1e-12)
        assert law.beta == 0.0
        assert law.is_symmetric


def test_subordinator_construction():
    law = from_subordinator(0.5, 1.0)
    # c_plus Gamma(1/2) = alpha kappa
    assert law.c_plus == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-14)
    assert law.c_minus == 0.0
    assert law.beta == 1.0
    assert law.is_subordinator_abs
    assert law.drift_b == pytest.approx(2 * law.c_plus, rel=1e-14)


def test_levy_measure_forces_drift():
    law = from_levy_measure(1.5, 0.2, 0.5)
    assert law.drift_b == pytest.approx((0.5 - 0.2) / (1 - 1.5))
    with pytest.raises(DomainError):
        from_levy_measure(1.5, 0.2, 0.5, drift_b=1.0)
    with pytest.raises(DomainError):
        from_levy_measure(1.0, 0.2, 0.5)
    assert from_levy_measure(1.0, 0.3, 0.3, drift_b=0.7).drift_b == 0.7


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha": 0.0, "c_minus": 1.0, "c_plus": 1.0},
        {"alpha": 2.5, "c_minus": 1.0, "c_plus": 1.0},
        {"alpha": 0.5, "c_minus": -1.0, "c_plus": 1.0},
        {"alpha": 0.5, "c_minus": 0.0, "c_plus": 0.0},
        {"alpha": 0.5, "c_minus": 0.1, "c_plus": 0.3, "drift_b": 0.0},
        {"alpha": 2.0},
    ],
)
def test_invalid_laws(kwargs):
    with pytest.raises(DomainError):
        StableLaw(**kwargs)


def test_gaussian_law():
    law = from_gaussian(2.0)
    assert law.kappa == 2.0
    assert law.is_gaussian and law.is_symmetric
    assert from_symmetric(2.0, 0.5).gauss_scale_a == pytest.approx(1.0)
    with pytest.raises(DomainError):
        sp_law(law, 3.0)


def test_sp_law_constant():
    # symmetric alpha = 1, kappa = 1, p = 2: index 1/2, constant 2/sqrt(pi)
    sub = sp_law(from_symmetric(1.0, 1.0), 2.0)
    assert sub.alpha == 0.5
    assert sub.kappa == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        sp_law(from_symmetric(1.0, 1.0), 1.0)


@pytest.mark.parametrize("alpha", [0.3, 0.7, 1.0, 1.5, 2.0])
def test_symmetric_characteristic_function(alpha):
    law = from_symmetric(alpha, 1.0)
    t = 0.25
    x = sample_stable(law, t, stream(11, "cf", int(alpha * 10)), size=200_000)
    for lam in (0.5, 1.0, 2.0):
        cf = empirical_cf(x, lam)
        exact = math.exp(-t * lam**alpha)
        assert abs(cf.real - exact) < 5 * math.sqrt(0.5 / x.size)
        assert abs(cf.imag) < 5 * math.sqrt(0.5 / x.size)


def test_asymmetric_characteristic_function():
    # alpha = 1.5, c_minus = 0.1, c_plus = 0.4: exponent from the Levy measure
    law = from_levy_measure(1.5, 0.1, 0.4)
    x = sample_stable(law, 1.0, stream(12, "cf-asym"), size=200_000)
    a = 1.5
    for lam in (0.5, 1.2):
        psi = -(law.scale**a) * lam**a * (1 - 1j * law.beta * math.tan(math.pi * a / 2))
        exact = np.exp(psi)
        cf = empirical_cf(x, lam)
        assert abs(cf - exact) < 6 * math.sqrt(1.0 / x.size)


def test_subordinator_laplace_and_support():
    law = from_subordinator(0.5, 1.0)
    x = sample_stable(law, 1.0, stream(13, "sub"), size=200_000)
    assert np.all(x >= 0)
    for lam in (0.5, 2.0):
        est = np.mean(np.exp(-lam * x))
        assert abs(est - math.exp(-math.sqrt(lam))) < 5 * np.std(np.exp(-lam * x)) / math.sqrt(x.size)


def test_one_sided_against_levy_cdf():
    # 1/2-stable with Laplace exp(-sqrt(lam)) has CDF erfc(1 / (2 sqrt x))
    x = sample_one_sided(0.5, 1.0, stream(14, "kanter"), size=100_000)
    res = stats.kstest(x, lambda v: stats.levy.cdf(v, scale=0.5))
    assert res.pvalue > 1e-3


def test_one_sided_laplace_general_index():
    x = sample_one_sided(0.3, 2.0, stream(15, "kanter2"), size=200_000)
    w = np.exp(-x)
    assert abs(w.mean() - math.exp(-2.0)) < 5 * w.std() / math.sqrt(x.size)


def test_scalar_and_errors():
    rng = stream(16, "scalar")
    assert isinstance(sample_stable(from_symmetric(1.2, 1.0), 1.0, rng), float)
    assert isinstance(sample_one_sided(0.5, 1.0, rng), float)
    with pytest.raises(ValueError):
        sample_stable(from_symmetric(1.2, 1.0), 1.0, None)
    with pytest.raises(DomainError):
        sample_stable(from_symmetric(1.2, 1.0), 0.0, rng)
    with pytest.raises(DomainError):
        sample_one_sided(1.0, 1.0, rng)
    with pytest.raises(DomainError):
        SubordinatorLaw(0.5, 0.0)
    assert SubordinatorLaw(0.5, 1.0).laplace(4.0) == pytest.approx(math.exp(-2.0))
