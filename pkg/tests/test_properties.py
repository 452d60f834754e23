import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import stats

from oracles import levy_cdf_mp, pvar_enumerate
from stablevar import from_levy_measure, from_subordinator, from_symmetric, sample_stable, sp_law
from stablevar.constants import (
    D_alpha_p,
    constants_report,
    cp_prime,
    d_alpha,
    lower_bound_kap,
    prop1_constant,
)
from stablevar.estimator import MCConfig, estimate_smallball, laplace_mc
from stablevar.path_sim import JumpSet, step_path_from_jumps
from stablevar.rng import stream
from stablevar.stable_core import kappa_from_cplus
from stablevar.variation import lemma1_check, oscillation, pvar_dp, pvar_mesh, sup_norm

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
seqs = st.lists(finite, min_size=1, max_size=12)
p_grid = st.sampled_from([1.0, 1.5, 2.0, 3.0, 5.0])
alphas = st.floats(0.05, 1.95)
kappas = st.floats(0.05, 20.0)


# ---------------------------------------------------------------------------
# laws


@given(alphas, kappas)
def test_kappa_round_trip(alpha, kappa):
    law = from_symmetric(alpha, kappa)
    assert kappa_from_cplus(alpha, law.c_plus) == pytest.approx(kappa, rel=1e-12)


@given(alphas, st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_strict_stability_relation(alpha, c_minus, c_plus):
    assume(abs(alpha - 1.0) > 1e-6 and c_minus + c_plus > 1e-3)
    for law in (from_levy_measure(alpha, c_minus, c_plus), from_symmetric(alpha, c_plus + 0.1)):
        assert law.c_plus == pytest.approx(law.c_minus + law.drift_b * (1.0 - alpha), rel=1e-12, abs=1e-12)
    if alpha < 1.0:
        law = from_subordinator(alpha, c_plus + 0.1)
        assert law.c_plus == pytest.approx(law.drift_b * (1.0 - alpha), rel=1e-12)


@pytest.mark.parametrize(
    "law",
    [from_symmetric(0.7, 1.0), from_symmetric(1.5, 2.0), from_levy_measure(1.3, 0.1, 0.6), from_subordinator(0.4, 1.0)],
    ids=["sym0.7", "sym1.5", "asym1.3", "sub0.4"],
)
def test_self_similarity_ks(law):
    t = 0.3
    a = sample_stable(law, t, stream(21, "ss-a"), size=100_000)
    b = t ** (1 / law.alpha) * sample_stable(law, 1.0, stream(21, "ss-b"), size=100_000)
    assert stats.ks_2samp(a, b).pvalue > 1e-3


@pytest.mark.parametrize(
    "law,p,eta",
    [
        (from_symmetric(0.5, 1.0), 1.0, 1e-3),
        (from_symmetric(1.5, 1.0), 2.5, 1e-2),
        (from_levy_measure(0.8, 0.2, 0.7), 1.6, 1e-3),
    ],
    ids=["sym0.5-p1", "sym1.5-p2.5", "asym0.8-p1.6"],
)
def test_jump_laplace_matches_sp_law(law, p, eta):
    # the dropped jumps form an independent remainder R >= 0, so by Jensen
    # exact <= E[exp(-lam S^eta)] <= exact * exp(lam E[R])
    cfg = MCConfig(n_paths=100_000, eta=eta, master_seed=22)
    res = laplace_mc(law, p, [0.5, 2.0], cfg, direct=False)
    assert res["laplace_const"] == pytest.approx(sp_law(law, p).kappa)
    small_mean = law.jump_mass * eta ** (p - law.alpha) / (p - law.alpha)
    for row in res["rows"]:
        lo = row["exact"] - 4 * row["jump_se"]
        hi = row["exact"] * math.exp(row["lambda"] * small_mean) + 4 * row["jump_se"]
        assert lo <= row["jump_mean"] <= hi


# ---------------------------------------------------------------------------
# p-variation


@given(seqs, p_grid)
def test_dp_matches_enumeration(x, p):
    ref = pvar_enumerate(x, p)
    assert pvar_dp(x, p).value == pytest.approx(ref, rel=1e-12, abs=1e-300)


@given(seqs, st.floats(1.0, 6.0), st.floats(0.0, 3.0))
def test_monotone_in_p_and_osc(x, p, dq):
    q = p + dq
    np_ = pvar_dp(x, p).value ** (1 / p)
    nq = pvar_dp(x, q).value ** (1 / q)
    osc = oscillation(x)
    assert nq <= np_ * (1 + 1e-12) + 1e-300
    assert np_ >= osc * (1 - 1e-12)
    assert osc >= abs(x[-1] - x[0])
    assert osc >= sup_norm(np.asarray(x) - x[0]) * (1 - 1e-15)


def test_large_q_limit_is_oscillation():
    rng = np.random.default_rng(23)
    for _ in range(5):
        x = np.cumsum(rng.standard_normal(200))
        x = x / (x.max() - x.min())
        assert pvar_dp(x, 2.0**10).value ** (2.0**-10) == pytest.approx(oscillation(x), abs=1e-6)


@given(st.lists(finite, min_size=3, max_size=40), st.floats(1.0, 5.0), st.data())
def test_superadditivity(x, p, data):
    m = data.draw(st.integers(1, len(x) - 2))
    whole = pvar_dp(x, p).value
    parts = pvar_dp(x[: m + 1], p).value + pvar_dp(x[m:], p).value
    assert whole >= parts * (1 - 1e-12)


@given(st.lists(finite, min_size=2, max_size=30), st.floats(1.0, 4.0))
def test_mesh_monotone_and_bounded(x, p):
    full = pvar_dp(x, p).value
    prev = 0.0
    for g in range(1, len(x)):
        cur = pvar_mesh(x, p, g)
        assert prev <= cur * (1 + 1e-12) + 1e-300
        assert cur <= full * (1 + 1e-12) + 1e-300
        prev = cur


@given(st.lists(st.floats(-5, 5, allow_nan=False).filter(lambda v: abs(v) > 1e-9), min_size=1, max_size=20), st.data())
def test_step_path_endpoint_is_jump_sum(sizes, data):
    times = sorted(data.draw(st.lists(st.floats(1e-6, 1.0), min_size=len(sizes), max_size=len(sizes), unique=True)))
    js = JumpSet(np.array(times), np.array(sizes), 1e-9)
    total = 0.0
    for s in sizes:
        total += s
    assert step_path_from_jumps(js, 32).values[-1] == total


@given(st.lists(finite, min_size=8, max_size=8).map(lambda v: [0.0] + v), st.sampled_from([1.5, 2.0, 3.0]),
       st.sampled_from([2, 4, 8]))
def test_lemma1_on_arbitrary_sequences(x, p, n_blocks):
    assert lemma1_check(x, p, n_blocks).holds


# ---------------------------------------------------------------------------
# constants


@given(st.floats(0.05, 0.99), kappas)
def test_prop1_and_lower_bound_meet_at_one(alpha, kappa):
    law = from_symmetric(alpha, kappa)
    a = prop1_constant(law, 1.0)
    assume(1e-200 < a < 1e200)
    assert lower_bound_kap(law, 1.0 + 1e-13) == pytest.approx(a, rel=1e-8)


@given(alphas, st.floats(0.1, 8.0), st.floats(0.2, 5.0))
def test_D_equals_lower_bound(alpha, dp, kappa):
    p = max(1.0, alpha) + dp
    assert D_alpha_p(alpha, p, kappa) == pytest.approx(lower_bound_kap(from_symmetric(alpha, kappa), p), rel=1e-12)


@given(st.sampled_from([3.0, 4.0, 6.0]), st.floats(0.01, 1.99), st.floats(-8, 8))
def test_gap_below_cp_prime(p, alpha, log_kappa):
    kappa = math.exp(log_kappa)
    assert D_alpha_p(alpha, p, kappa) - d_alpha(alpha, kappa) <= cp_prime(p) * (1 + 1e-9)


@given(alphas, st.floats(0.05, 6.0), st.floats(0.2, 5.0))
def test_report_values_positive_finite(alpha, dp, kappa):
    p = max(1.0, alpha) + dp
    rep = constants_report(from_symmetric(alpha, kappa), p).to_dict()
    for key in ("gamma_exponent", "lower_bound_kap", "D_alpha_p", "d_alpha"):
        assert rep[key] is not None and math.isfinite(rep[key]) and rep[key] > 0


# ---------------------------------------------------------------------------
# estimator


def test_wilson_coverage_subordinator():
    law = from_subordinator(0.5, 1.0)
    eps = [0.2, 0.5]
    exact = [float(levy_cdf_mp(e)) for e in eps]
    covered = 0
    total = 0
    for seed in range(200):
        cfg = MCConfig(n_paths=2000, epsilons=eps, master_seed=1000 + seed, pilot=False)
        for row, ex in zip(estimate_smallball(law, "pvar:2", cfg).rows, exact):
            covered += row.ci_lo <= ex <= row.ci_hi
            total += 1
    assert covered / total >= 0.99


def test_reports_identical_across_threads():
    law = from_symmetric(1.5, 1.0)
    reports = []
    for threads in (1, 4, 16):
        cfg = MCConfig(n_paths=3000, grid_n=64, epsilons=[1.5, 3.0], master_seed=24, block_size=256, threads=threads)
        d = estimate_smallball(law, "pvar:2", cfg).to_dict()
        d["config"].pop("threads")
        reports.append(d)
    assert reports[0] == reports[1] == reports[2]
