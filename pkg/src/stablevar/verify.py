"""Pinned-seed verification suites run by `stablevar verify`."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import MCConfig, estimate_smallball, laplace_mc, subordination_bound_check
from .path_sim import simulate_grid_batch
from .rng import stream
from .special import brownian_sup_cdf
from .stable_core import from_gaussian, from_symmetric
from .variation import block_pvars, lemma1_check, lemma2_check, pvar_bruteforce, pvar_dp

SUITES = ("dp", "lemmas", "laplace", "subordination", "gaussian")

DP_PS = (1.0, 1.5, 2.0, 3.0, 5.0)
LEMMA_ALPHAS = (0.8, 1.0, 1.5, 2.0)
LEMMA_PS = (1.5, 2.0, 3.0)
LEMMA_BLOCKS = (2, 4, 8)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def dp_suite(n_sequences=1000, max_len=12, seed=20240101):
    """Exact DP against exhaustive enumeration on random short sequences."""
    rng = stream(seed, "verify-dp")
    checks = []
    for p in DP_PS:
        worst = 0.0
        mismatches = 0
        for _ in range(n_sequences):
            length = int(rng.integers(1, max_len + 1))
            # mix continuous values with small integers so ties occur
            if rng.random() < 0.3:
                x = rng.integers(-3, 4, size=length).astype(float)
            else:
                x = rng.standard_normal(length)
            a = pvar_dp(x, p).value
            b = pvar_bruteforce(x, p).value
            err = abs(a - b) / max(abs(b), 1e-300) if b else abs(a)
            worst = max(worst, err)
            if err > 1e-12:
                mismatches += 1
        checks.append(Check(f"dp p={p:g}", mismatches == 0, f"{mismatches} mismatches, worst rel err {worst:.3g}"))
    return checks


def _pin_blocks(path, n_blocks):
    # subtract the piecewise-linear chord through the block endpoints, so
    # every block endpoint sits at 0
    steps = path.size - 1
    bounds = np.arange(0, steps + 1, steps // n_blocks)
    chord = np.interp(np.arange(steps + 1), bounds, path[bounds])
    out = path - chord
    out[bounds] = 0.0
    return out


def lemma_suite(n_paths=10_000, grid_n=256, seed=20240102):
    """Both block inequalities on simulated paths, spread evenly over the alphas.

    The second inequality's premise forces every block endpoint to 0, so each path is also
    checked after pinning its block endpoints, where the premise holds with
    eps the largest block p-variation.
    """
    per_alpha = n_paths // len(LEMMA_ALPHAS)
    l1_viol = l2_viol = l2_active = 0
    total = 0
    for a_idx, alpha in enumerate(LEMMA_ALPHAS):
        law = from_symmetric(alpha, 1.0)
        paths = simulate_grid_batch(law, grid_n, per_alpha, stream(seed, "verify-lemmas", a_idx))
        for path in paths:
            total += 1
            for p in LEMMA_PS:
                for nb in LEMMA_BLOCKS:
                    if not lemma1_check(path, p, nb).holds:
                        l1_viol += 1
                    eps = max(block_pvars(path, p, nb).values)
                    if not lemma2_check(path, p, nb, eps).holds:
                        l2_viol += 1
                    pinned = _pin_blocks(path, nb)
                    eps = max(block_pvars(pinned, p, nb).values)
                    w = lemma2_check(pinned, p, nb, eps)
                    l2_active += w.premise
                    if not w.holds:
                        l2_viol += 1
    return [
        Check("lemma1", l1_viol == 0, f"{l1_viol} violations on {total} paths"),
        Check("lemma2", l2_viol == 0 and l2_active > 0, f"{l2_viol} violations, {l2_active} checks with premise"),
    ]


def laplace_suite(n_paths=200_000, seed=20240103, eta=1e-4):
    """Jump-route and direct-route Laplace transforms of S^2 for alpha = 1."""
    law = from_symmetric(1.0, 1.0)
    cfg = MCConfig(n_paths=n_paths, master_seed=seed, eta=eta)
    rep = laplace_mc(law, 2.0, [1.0, 4.0, 16.0], cfg)
    checks = []
    for row in rep["rows"]:
        ex = row["exact"]
        ok_j = abs(row["jump_mean"] - ex) <= 3 * row["jump_se"] + 0.01 * ex
        ok_d = abs(row["direct_mean"] - ex) <= 3 * row["direct_se"]
        checks.append(
            Check(
                f"laplace lambda={row['lambda']:g}",
                ok_j and ok_d,
                f"exact {ex:.6g}, jump {row['jump_mean']:.6g}, direct {row['direct_mean']:.6g}",
            )
        )
    return checks


def subordination_suite(n_paths=10_000, grid_n=1024, seed=20240104):
    rep = subordination_bound_check(1.0, 1.0, 3.0, MCConfig(n_paths=n_paths, grid_n=grid_n, master_seed=seed))
    return [Check("subordination bound", rep["violations"] == 0, f"{rep['violations']} violations on {n_paths} paths")]


def gaussian_suite(n_paths=100_000, grid_n=2**14, seed=20240105, eps=0.5):
    cfg = MCConfig(n_paths=n_paths, grid_n=grid_n, master_seed=seed, epsilons=[eps], pilot=False)
    est = estimate_smallball(from_gaussian(1.0), "sup", cfg)
    row = est.rows[0]
    oracle = brownian_sup_cdf(eps)
    ok = abs(row.p_hat - oracle) <= 3 * row.se + 0.05 * oracle
    tail = -0.04 * math.log(brownian_sup_cdf(0.2))
    ok_tail = abs(tail - math.pi**2 / 8) <= 0.1 * math.pi**2 / 8
    return [
        Check("brownian sup MC", ok, f"p_hat {row.p_hat:.6g} +- {row.se:.2g}, oracle {oracle:.6g}"),
        Check("brownian sup constant", ok_tail, f"-eps^2 log P at eps=0.2: {tail:.6g}"),
    ]


def run_suite(name):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    return {
        "dp": dp_suite,
        "lemmas": lemma_suite,
        "laplace": laplace_suite,
        "subordination": subordination_suite,
        "gaussian": gaussian_suite,
    }[name]()
