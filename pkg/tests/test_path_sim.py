import math

import numpy as np
import pytest
from scipy import stats

from stablevar import DomainError, from_gaussian, from_subordinator, from_symmetric
from stablevar.path_sim import (
    JUMPS,
    JumpSet,
    PathGrid,
    add_drift,
    sample_sp_truncated,
    simulate_grid,
    simulate_grid_batch,
    simulate_jumps,
    simulate_subordinated,
    simulate_subordinated_batch,
    sp_from_jumps,
    step_path_from_jumps,
)
from stablevar.rng import stream


def test_pathgrid_validation():
    with pytest.raises(DomainError):
        PathGrid(np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        PathGrid(np.array([0.0]))
    with pytest.raises(DomainError):
        PathGrid(np.array([0.0, np.nan]))
    g = PathGrid(np.array([0.0, 1.0, 2.0]))
    assert g.n == 2 and np.allclose(g.times, [0, 0.5, 1])


def test_single_step_grid():
    law = from_symmetric(1.3, 1.0)
    g = simulate_grid(law, 1, stream(1, "one"))
    assert g.values.shape == (2,) and g.values[0] == 0.0


def test_brownian_endpoint_variance():
    paths = simulate_grid_batch(from_gaussian(1.0), 1024, 100_000, stream(2, "bm"))
    end = paths[:, -1]
    var = np.mean(end**2)
    se = np.std(end**2) / math.sqrt(end.size)
    assert abs(var - 1.0) < 3 * se


def test_subordinator_paths_monotone():
    paths = simulate_grid_batch(from_subordinator(0.5, 1.0), 256, 200, stream(3, "mono"))
    assert np.all(np.diff(paths, axis=1) >= 0)


def test_jump_counts_and_signs():
    law = from_symmetric(1.0, 1.0)
    rng = stream(4, "count")
    counts = np.array([len(simulate_jumps(law, 1.0, rng)) for _ in range(100_000)])
    assert abs(counts.mean() - 2 / math.pi) < 3 * counts.std() / math.sqrt(counts.size)
    rng = stream(4, "count2")
    counts2 = np.array([len(simulate_jumps(law, 2.0, rng)) for _ in range(100_000)])
    assert counts2.mean() / counts.mean() == pytest.approx(0.5, rel=0.03)
    js = simulate_jumps(from_subordinator(0.5, 1.0), 1e-3, stream(4, "pos"))
    assert len(js) > 0 and np.all(js.jump_sizes > 0)
    assert np.all(np.abs(js.jump_sizes) > 1e-3)
    assert np.all(np.diff(js.jump_times) > 0)
    with pytest.raises(DomainError):
        simulate_jumps(from_gaussian(1.0), 1e-3, rng)


def test_jumpset_validation_and_truncate():
    with pytest.raises(DomainError):
        JumpSet(np.array([0.5, 0.4]), np.array([1.0, 1.0]), 0.1)
    with pytest.raises(DomainError):
        JumpSet(np.array([0.5]), np.array([0.05]), 0.1)
    js = JumpSet(np.array([0.1, 0.5, 0.9]), np.array([0.2, -1.5, 0.7]), 0.1)
    t = js.truncate(0.5)
    assert list(t.jump_sizes) == [-1.5, 0.7]
    with pytest.raises(DomainError):
        js.truncate(0.05)


def test_sp_from_jumps():
    assert sp_from_jumps(JumpSet(np.array([]), np.array([]), 0.1), 2) == 0.0
    assert sp_from_jumps(JumpSet(np.array([0.5]), np.array([-2.0]), 0.1), 3) == 8.0
    # nested truncations are monotone
    js = simulate_jumps(from_symmetric(0.7, 1.0), 1e-3, stream(5, "nest"))
    vals = [sp_from_jumps(js.truncate(e), 1.0) for e in (1e-3, 1e-2, 1e-1, 1.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_sample_sp_truncated_coupling():
    x = sample_sp_truncated(from_symmetric(0.7, 1.0), 1.0, [1e-3, 1e-2, 1e-1], 2000, stream(6, "couple"))
    assert np.all(x[:, 0] >= x[:, 1]) and np.all(x[:, 1] >= x[:, 2])


def test_sp_laplace_small_run():
    # S^2 is 1/2-stable with Laplace constant 2/sqrt(pi) for alpha = 1, kappa = 1
    law = from_symmetric(1.0, 1.0)
    x = sample_sp_truncated(law, 2.0, [1e-3], 50_000, stream(7, "lap"))[:, 0]
    w = np.exp(-4.0 * x)
    exact = math.exp(-2.0 * 2.0 / math.sqrt(math.pi))
    assert abs(w.mean() - exact) < 3 * w.std() / math.sqrt(w.size) + 0.01 * exact


def test_step_path():
    empty = JumpSet(np.array([]), np.array([]), 0.1)
    assert np.all(step_path_from_jumps(empty, 4).values == 0)
    one = JumpSet(np.array([0.3]), np.array([1.0]), 0.1)
    v = step_path_from_jumps(one, 10).values
    assert list(v) == [0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1]
    two = JumpSet(np.array([0.2, 0.7]), np.array([1.0, -2.0]), 0.1)
    g = step_path_from_jumps(two, 10)
    assert g.values[-1] == -1.0 and g.method == JUMPS


def test_subordinated_path_laws():
    sigma, z = simulate_subordinated_batch(1.0, 1.0, 4, 200_000, stream(8, "sub"))
    assert np.all(np.diff(sigma, axis=1) >= 0)
    w = np.exp(-sigma[:, -1])
    assert abs(w.mean() - math.exp(-math.sqrt(2))) < 3 * w.std() / math.sqrt(w.size)
    c = np.cos(z[:, -1])
    assert abs(c.mean() - math.exp(-1.0)) < 3 * c.std() / math.sqrt(c.size)


def test_subordinated_single_path_composition():
    sp = simulate_subordinated(1.2, 1.0, 32, stream(9, "one"), refine=4)
    assert sp.values[0] == 0.0 and sp.w_grid[0] == 0.0
    assert sp.horizon == sp.sigma[-1]
    assert np.all(np.diff(sp.sigma) >= 0)
    assert sp.as_grid().n == 32


def test_grid_and_subordination_agree():
    law = from_symmetric(1.5, 1.0)
    a = np.max(np.abs(simulate_grid_batch(law, 1024, 10_000, stream(10, "g"))), axis=1)
    _, z = simulate_subordinated_batch(1.5, 1.0, 1024, 10_000, stream(10, "s"))
    b = np.max(np.abs(z), axis=1)
    assert stats.ks_2samp(a, b).pvalue > 1e-3


def test_add_drift():
    g = PathGrid(np.zeros(5))
    assert list(add_drift(g, 1.0).values) == [0, 0.25, 0.5, 0.75, 1.0]
    h = simulate_grid(from_symmetric(1.1, 1.0), 8, stream(11, "d"))
    assert np.array_equal(add_drift(h, 0.0).values, h.values)
    assert add_drift(h, 2.5).values[-1] == h.values[-1] + 2.5


def test_replay_is_deterministic():
    law = from_symmetric(0.9, 1.0)
    a = simulate_grid_batch(law, 32, 10, stream(12, "r"))
    b = simulate_grid_batch(law, 32, 10, stream(12, "r"))
    assert np.array_equal(a, b)
