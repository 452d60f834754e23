"""Semi-norms on discrete paths: strong p-variation and relatives.

Value sequences are treated combinatorially: a p-variation is the supremum,
over all increasing index subsequences, of the sum of |increment|^p. Time
stamps only enter the Hoelder semi-norm, the mesh-restricted variation and
the L2 norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .errors import DomainError

BRUTEFORCE_MAX_LEN = 20


@dataclass(frozen=True)
class VariationResult:
    value: float
    optimal_indices: tuple
    p: float

    @property
    def norm(self):
        return self.value ** (1.0 / self.p)


@dataclass(frozen=True)
class BlockDecomposition:
    n_blocks: int
    values: tuple
    boundaries: tuple

    @property
    def total(self):
        return math.fsum(self.values)


@dataclass(frozen=True)
class LemmaWitness:
    holds: bool
    lhs: float
    rhs: float
    premise: bool = True


def partition_sum(values, indices, p):
    """Sum of |x[i_j] - x[i_{j-1}]|^p over a subsequence, compensated."""
    x = np.asarray(values, dtype=float)
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size < 2:
        return 0.0
    return math.fsum(np.abs(np.diff(x[idx])) ** p)


# ---------------------------------------------------------------------------
# kernels

@njit(cache=True)
def _extrema(x):
    # indices of the local extrema of x, endpoints included, plateaus collapsed
    n = x.shape[0]
    idx = np.empty(n, np.int64)
    idx[0] = 0
    m = 1
    for i in range(1, n):
        xi = x[i]
        last = x[idx[m - 1]]
        if xi == last:
            continue
        if m >= 2 and (last - x[idx[m - 2]]) * (xi - last) > 0:
            idx[m - 1] = i
            continue
        idx[m] = i
        m += 1
    return idx[:m]


@njit(cache=True)
def _prev_pointers(y):
    # ps[i]: last l < i with y[l] < y[i]; pg[i]: last l < i with y[l] > y[i]; -1 if none
    m = y.shape[0]
    ps = -np.ones(m, np.int64)
    pg = -np.ones(m, np.int64)
    st_s = np.empty(m, np.int64)
    st_g = np.empty(m, np.int64)
    ns = 0
    ng = 0
    for i in range(m):
        while ns > 0 and y[st_s[ns - 1]] >= y[i]:
            ns -= 1
        if ns > 0:
            ps[i] = st_s[ns - 1]
        st_s[ns] = i
        ns += 1
        while ng > 0 and y[st_g[ng - 1]] <= y[i]:
            ng -= 1
        if ng > 0:
            pg[i] = st_g[ng - 1]
        st_g[ng] = i
        ng += 1
    return ps, pg


@njit(cache=True)
def _pvar_extrema_dp(y, p):
    # f[i] = best sum over chains ending at y[i]. Some optimal predecessor j has
    # every y[k], j < k < i, between y[j] and y[i] (inserting an outside point
    # never lowers the sum), so j runs over the backward record lows before the
    # last point above y[i], and the backward record highs before the last
    # point below y[i].
    m = y.shape[0]
    ps, pg = _prev_pointers(y)
    f = np.zeros(m)
    pred = -np.ones(m, np.int64)
    for i in range(1, m):
        yi = y[i]
        best = -1.0
        bj = -1
        j = ps[i]
        stop = pg[i]
        while j > stop:
            v = f[j] + (yi - y[j]) ** p
            if v > best or (v == best and j < bj):
                best = v
                bj = j
            j = ps[j]
        j = pg[i]
        stop = ps[i]
        while j > stop:
            v = f[j] + (y[j] - yi) ** p
            if v > best or (v == best and j < bj):
                best = v
                bj = j
            j = pg[j]
        if bj < 0:
            best = 0.0
        f[i] = best
        pred[i] = bj
    end = 0
    for i in range(1, m):
        if f[i] > f[end]:
            end = i
    return f[end], end, pred


@njit(cache=True)
def _pvar_value(x, p):
    if x.shape[0] < 2:
        return 0.0
    e = _extrema(x)
    if e.shape[0] < 2:
        return 0.0
    y = x[e]
    val, _, _ = _pvar_extrema_dp(y, p)
    return val


@njit(cache=True)
def _pvar_rows(paths, p):
    out = np.empty(paths.shape[0])
    for r in range(paths.shape[0]):
        out[r] = _pvar_value(paths[r], p)
    return out


@njit(cache=True)
def _pvar_halves_rows(paths, p, mid):
    out = np.empty((paths.shape[0], 3))
    for r in range(paths.shape[0]):
        row = paths[r]
        out[r, 0] = _pvar_value(row, p)
        out[r, 1] = _pvar_value(row[: mid + 1], p)
        out[r, 2] = _pvar_value(row[mid:], p)
    return out


@njit(cache=True)
def _pvar_mesh_dp(x, p, gap):
    n = x.shape[0]
    f = np.zeros(n)
    best_all = 0.0
    for i in range(1, n):
        best = 0.0
        lo = max(0, i - gap)
        for j in range(lo, i):
            v = f[j] + abs(x[i] - x[j]) ** p
            if v > best:
                best = v
        f[i] = best
        if best > best_all:
            best_all = best
    return best_all


@njit(cache=True)
def _holder_uniform(x, p, n):
    # max over pairs of |x_j - x_i| / ((j - i)/n)^(1/p); the weight falls with
    # the gap, so the scan for fixed i stops once range * weight <= best
    m = x.shape[0]
    w = np.empty(m)
    for d in range(1, m):
        w[d] = (d / n) ** (-1.0 / p)
    lo = x.min()
    hi = x.max()
    rng = hi - lo
    best = 0.0
    for i in range(m - 1):
        for j in range(i + 1, m):
            wd = w[j - i]
            if rng * wd <= best:
                break
            v = abs(x[j] - x[i]) * wd
            if v > best:
                best = v
    return best


@njit(cache=True)
def _holder_times(t, x, p):
    # same as above for nondecreasing, possibly repeated, time stamps; the scan
    # for fixed i stops at the gap dt where the largest reachable increment
    # after i, times dt^(-1/p), can no longer beat the best value
    m = x.shape[0]
    sufmax = np.empty(m)
    sufmin = np.empty(m)
    sufmax[m - 1] = x[m - 1]
    sufmin[m - 1] = x[m - 1]
    for k in range(m - 2, -1, -1):
        sufmax[k] = max(x[k], sufmax[k + 1])
        sufmin[k] = min(x[k], sufmin[k + 1])
    best = 0.0
    inv = 1.0 / p
    # seed the bound with short gaps so the cutoffs bite early
    for i in range(m - 1):
        for j in range(i + 1, min(i + 5, m)):
            dt = t[j] - t[i]
            dx = abs(x[j] - x[i])
            if dt <= 0.0:
                if dx > 0.0:
                    return np.inf
                continue
            v = dx * dt ** (-inv)
            if v > best:
                best = v
    for i in range(m - 1):
        reach = max(sufmax[i + 1] - x[i], x[i] - sufmin[i + 1])
        if reach <= 0.0:
            continue
        cutoff = np.inf if best == 0.0 else (reach / best) ** p
        for j in range(i + 1, m):
            dt = t[j] - t[i]
            if dt >= cutoff:
                break
            dx = abs(x[j] - x[i])
            if dt <= 0.0:
                if dx > 0.0:
                    return np.inf
                continue
            v = dx * dt ** (-inv)
            if v > best:
                best = v
                cutoff = (reach / best) ** p
    return best


# ---------------------------------------------------------------------------
# public operations

def _as_values(values):
    x = np.ascontiguousarray(values, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DomainError("values must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(x)):
        raise DomainError("values must be finite")
    return x


def _check_grid_p(p):
    if not p >= 1.0:
        raise DomainError(
            f"p = {p} < 1: the p-variation of a non-step path diverges; "
            "use jump_p_sum for pure-jump functions"
        )


def pvar_dp(values, p):
    """Exact strong p-variation (p >= 1) of a finite sequence.

    The sequence is first pruned to its local extrema; an optimal subsequence
    only uses those. A dynamic program over the extrema then finds the best
    chain, visiting only predecessors that bound the values in between.
    Ties prefer the earliest predecessor and the earliest end point.
    """
    _check_grid_p(p)
    x = _as_values(values)
    if x.size < 2:
        return VariationResult(0.0, (0,), float(p))
    e = _extrema(x)
    if e.size < 2:
        return VariationResult(0.0, (0,), float(p))
    _, end, pred = _pvar_extrema_dp(x[e], float(p))
    chain = []
    k = end
    while k >= 0:
        chain.append(int(e[k]))
        k = pred[k]
    chain.reverse()
    return VariationResult(partition_sum(x, chain, p), tuple(chain), float(p))


def pvar_values(paths, p):
    """p-variation (not its 1/p power) of every row of a 2-D array."""
    _check_grid_p(p)
    return _pvar_rows(np.ascontiguousarray(paths, dtype=float), float(p))


def pvar_halves(paths, p):
    """Rows of (V, V on first half, V on second half), split at the middle node."""
    _check_grid_p(p)
    paths = np.ascontiguousarray(paths, dtype=float)
    steps = paths.shape[1] - 1
    if steps % 2:
        raise DomainError("the split needs an even number of grid steps")
    return _pvar_halves_rows(paths, float(p), steps // 2)


def _subset_incidence(length, lo, hi):
    # subsets lo..hi-1 encoded as bit masks; entry (s, c) is 1 iff both points
    # of pair c are members of subset s and no member lies strictly between
    ids = np.arange(lo, hi, dtype=np.int64)
    masks = ((ids[:, None] >> np.arange(length)) & 1).astype(np.int32)
    cs = np.concatenate([np.zeros((masks.shape[0], 1), np.int32), np.cumsum(masks, axis=1)], axis=1)
    a, b = _pairs(length).T
    return ((masks[:, a] * masks[:, b]) * (cs[:, b] - cs[:, a + 1] == 0)).astype(float)


@lru_cache(maxsize=None)
def _pairs(length):
    return np.array([(a, b) for a in range(length) for b in range(a + 1, length)], dtype=np.int64).reshape(-1, 2)


@lru_cache(maxsize=16)
def _small_incidence(length):
    return _subset_incidence(length, 0, 1 << length)


def pvar_bruteforce(values, p):
    """Exhaustive maximum over all 2^len subsequences (len <= 20); any p > 0."""
    x = _as_values(values)
    if x.size > BRUTEFORCE_MAX_LEN:
        raise DomainError(f"brute force is limited to {BRUTEFORCE_MAX_LEN} points")
    if not p > 0:
        raise DomainError("p must be positive")
    if x.size < 2:
        return VariationResult(0.0, (0,), float(p))
    length = x.size
    pairs = _pairs(length)
    w = np.abs(x[pairs[:, 1]] - x[pairs[:, 0]]) ** p
    best, best_id = -1.0, 0
    chunk = 1 << 14
    for lo in range(0, 1 << length, chunk):
        if length <= 14:
            inc = _small_incidence(length)
        else:
            inc = _subset_incidence(length, lo, min(lo + chunk, 1 << length))
        totals = inc @ w
        k = int(np.argmax(totals))
        if totals[k] > best:
            best, best_id = float(totals[k]), lo + k
    chosen = tuple(i for i in range(length) if best_id >> i & 1)
    return VariationResult(partition_sum(x, chosen, p), chosen, float(p))


def pvar_mesh(values, p, max_gap):
    """Supremum over subsequences whose consecutive index gaps are <= max_gap."""
    _check_grid_p(p)
    if int(max_gap) < 1:
        raise DomainError("max_gap must be at least 1")
    x = _as_values(values)
    if x.size < 2:
        return 0.0
    return float(_pvar_mesh_dp(x, float(p), int(min(max_gap, x.size))))


def _block_bounds(length, n_blocks):
    steps = length - 1
    if n_blocks < 1 or steps % n_blocks:
        raise DomainError(f"{steps} grid steps are not divisible into {n_blocks} blocks")
    m = steps // n_blocks
    return [k * m for k in range(n_blocks + 1)]


def block_pvars(values, p, n_blocks):
    """p-variation on each block [s_{k-1}, s_k] of an equal split; boundaries shared."""
    _check_grid_p(p)
    x = _as_values(values)
    bounds = _block_bounds(x.size, n_blocks)
    vals = tuple(
        float(_pvar_value(np.ascontiguousarray(x[a : b + 1]), float(p)))
        for a, b in zip(bounds[:-1], bounds[1:])
    )
    return BlockDecomposition(n_blocks, vals, tuple(bounds))


def jump_p_sum(jumps, p):
    """sum |jump|^p: the p-th power of the p-variation of a pure-jump function."""
    sizes = getattr(jumps, "sizes", jumps)
    sizes = np.asarray(sizes, dtype=float)
    if sizes.size == 0:
        return 0.0
    return math.fsum(np.abs(sizes) ** p)


def sup_norm(values):
    x = np.asarray(values, dtype=float)
    return float(np.max(np.abs(x)))


def oscillation(values):
    x = np.asarray(values, dtype=float)
    return float(x.max() - x.min())


def holder_seminorm(values, p, n=None):
    """Discrete (1/p)-Hoelder semi-norm of values on the uniform grid k/n."""
    _check_grid_p(p)
    x = _as_values(values)
    if n is None:
        n = x.size - 1
    if x.size < 2:
        return 0.0
    return float(_holder_uniform(x, float(p), float(n)))


def holder_constant(times, values, p):
    """(1/p)-Hoelder constant over the points (times[i], values[i]), times sorted."""
    t = np.ascontiguousarray(times, dtype=float)
    x = np.ascontiguousarray(values, dtype=float)
    if t.shape != x.shape:
        raise DomainError("times and values must have the same shape")
    if np.any(np.diff(t) < 0):
        raise DomainError("times must be nondecreasing")
    if x.size < 2:
        return 0.0
    return float(_holder_times(t, x, float(p)))


def l2_norm(values):
    """Left-endpoint Riemann approximation of (int_0^1 x_t^2 dt)^(1/2)."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        return float(abs(x[0]))
    return float(np.sqrt(np.mean(x[:-1] ** 2)))


def lemma1_check(values, p, n_blocks):
    """V_p <= sum_k V_p^{k,n} + n * oscillation^p."""
    x = _as_values(values)
    total = pvar_dp(x, p).value
    blocks = block_pvars(x, p, n_blocks)
    rhs = blocks.total + n_blocks * oscillation(x) ** p
    return LemmaWitness(total <= rhs * (1.0 + 1e-12), total, rhs)


def lemma2_check(values, p, n_blocks, epsilon):
    """If every block has V_p^{k,n} <= eps and (x_{s_k} - x_{s_{k-1}}) x_{s_k} <= 0,
    then V_p <= 5^p n eps. A false premise holds vacuously."""
    x = _as_values(values)
    blocks = block_pvars(x, p, n_blocks)
    b = np.asarray(blocks.boundaries)
    ends = x[b]
    signs_ok = bool(np.all((ends[1:] - ends[:-1]) * ends[1:] <= 0.0))
    premise = signs_ok and max(blocks.values) <= epsilon
    total = pvar_dp(x, p).value
    rhs = 5.0**p * n_blocks * epsilon
    if not premise:
        return LemmaWitness(True, total, rhs, premise=False)
    return LemmaWitness(total <= rhs * (1.0 + 1e-12), total, rhs)
