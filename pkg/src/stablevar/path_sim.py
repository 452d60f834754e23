"""Sample paths of a strictly stable process on [0, 1].

Three constructions: i.i.d. grid increments (exact at the grid nodes),
truncated jump sets (jumps with |size| > eta, the compensated small-jump part
dropped), and Bochner subordination Z = W o sigma for symmetric laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DomainError
from .stable_core import sample_one_sided, sample_stable

GRID = "grid_increments"
JUMPS = "jump_reconstruction"
SUBORDINATION = "subordination"

DEFAULT_ETA = 1e-4
DEFAULT_GRID_N = 2**12
_JUMP_CHUNK = 2**22


@dataclass(frozen=True)
class PathGrid:
    values: np.ndarray
    method: str = GRID
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise DomainError("a path needs n + 1 >= 2 values")
        if v[0] != 0.0:
            raise DomainError("paths start at 0")
        if not np.all(np.isfinite(v)):
            raise DomainError("path values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.size - 1

    @property
    def times(self):
        return np.arange(self.n + 1) / self.n


@dataclass(frozen=True)
class JumpSet:
    """Jumps of |size| > eta on (0, 1], sorted by time."""

    jump_times: np.ndarray
    jump_sizes: np.ndarray
    eta: float

    def __post_init__(self):
        t = np.asarray(self.jump_times, dtype=float)
        s = np.asarray(self.jump_sizes, dtype=float)
        if t.shape != s.shape or t.ndim != 1:
            raise DomainError("jump times and sizes must be 1-D and of equal length")
        if not self.eta > 0:
            raise DomainError("truncation level eta must be positive")
        if t.size and (np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] > 1):
            raise DomainError("jump times must be strictly increasing in (0, 1]")
        if np.any(np.abs(s) <= self.eta):
            raise DomainError("every jump must exceed eta in absolute value")
        object.__setattr__(self, "jump_times", t)
        object.__setattr__(self, "jump_sizes", s)

    @property
    def sizes(self):
        return self.jump_sizes

    def __len__(self):
        return self.jump_sizes.size

    def truncate(self, eta):
        """The nested jump set above a coarser level eta >= self.eta."""
        if eta < self.eta:
            raise DomainError("cannot refine a jump set below its own truncation level")
        keep = np.abs(self.jump_sizes) > eta
        return JumpSet(self.jump_times[keep], self.jump_sizes[keep], eta)


@dataclass(frozen=True)
class SubordinatedPath:
    """Z = W o sigma on the grid k/n, with W also kept on a uniform grid of [0, sigma_1]."""

    sigma: np.ndarray
    w_grid: np.ndarray
    values: np.ndarray
    alpha: float
    kappa: float

    @property
    def n(self):
        return self.values.size - 1

    @property
    def horizon(self):
        return float(self.sigma[-1])

    def as_grid(self):
        return PathGrid(self.values, SUBORDINATION, {"alpha": self.alpha, "kappa": self.kappa})


def tail_mass(law, eta):
    """nu({|z| > eta}) split as (negative side, positive side)."""
    scale = eta ** (-law.alpha) / law.alpha
    return law.c_minus * scale, law.c_plus * scale


def grid_increments(law, n, n_paths, rng):
    """(n_paths, n) array of i.i.d. increments Z_{1/n}."""
    if int(n) < 1:
        raise DomainError("grid size n must be at least 1")
    return sample_stable(law, 1.0 / n, rng, size=(n_paths, n))


def simulate_grid_batch(law, n, n_paths, rng):
    """(n_paths, n + 1) array of paths on the grid k/n, first column zero."""
    inc = grid_increments(law, n, n_paths, rng)
    out = np.zeros((n_paths, n + 1))
    np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def simulate_grid(law, n, rng, provenance=None):
    values = simulate_grid_batch(law, n, 1, rng)[0]
    return PathGrid(values, GRID, dict(provenance or {}, n=n))


def _check_jump_law(law, eta):
    if law.is_gaussian:
        raise DomainError("jump simulation needs alpha < 2")
    if not eta > 0:
        raise DomainError("truncation level eta must be positive")


def _open_unit(rng, k):
    # uniform on the open interval (0, 1): exact zeros are redrawn
    u = rng.random(k)
    zero = u == 0.0
    while zero.any():
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0.0
    return u


def simulate_jumps(law, eta, rng):
    """Jumps of |size| > eta on [0, 1]: Poisson counts per side, Pareto sizes
    eta * U^(-1/alpha), uniform times."""
    _check_jump_law(law, eta)
    m_neg, m_pos = tail_mass(law, eta)
    k_neg = rng.poisson(m_neg)
    k_pos = rng.poisson(m_pos)
    inv = -1.0 / law.alpha
    pos = eta * _open_unit(rng, k_pos) ** inv
    neg = -eta * _open_unit(rng, k_neg) ** inv
    sizes = np.concatenate([pos, neg])
    times = 1.0 - rng.random(sizes.size)
    order = np.argsort(times, kind="stable")
    return JumpSet(times[order], sizes[order], eta)


def sp_from_jumps(jumps, p):
    """S^{p,eta}_1 = sum |size|^p over the jump set."""
    if not p > 0:
        raise DomainError("p must be positive")
    if len(jumps) == 0:
        return 0.0
    return math.fsum(np.abs(jumps.jump_sizes) ** p)


def sample_sp_truncated(law, p, etas, size, rng):
    """(size, len(etas)) array of S^{p,eta}_1 for each eta, coupled on one jump draw.

    Only absolute jump sizes are drawn: for S^p the sign and time are irrelevant.
    """
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    eta_min = float(etas.min())
    _check_jump_law(law, eta_min)
    if not p > 0:
        raise DomainError("p must be positive")
    mass = law.jump_mass * eta_min ** (-law.alpha) / law.alpha
    counts = rng.poisson(mass, size)
    out = np.zeros((size, etas.size))
    # |size|^p = eta^p U^(-p/alpha); |size| > eta' is U < (eta/eta')^alpha
    thresholds = (eta_min / etas) ** law.alpha
    thresholds[etas == eta_min] = 2.0
    start = 0
    while start < size:
        # chunk by paths so the uniform buffer stays near _JUMP_CHUNK entries
        stop = start + 1
        total = counts[start]
        while stop < size and total + counts[stop] <= _JUMP_CHUNK:
            total += counts[stop]
            stop += 1
        u = _open_unit(rng, int(total))
        _pareto_power_sums(u, counts[start:stop], -p / law.alpha, eta_min**p, thresholds, out[start:stop])
        start = stop
    return out


@njit(cache=True)
def _pareto_power_sums(u, counts, expo, scale, thresholds, out):
    k = 0
    for i in range(counts.size):
        for _ in range(counts[i]):
            x = u[k]
            k += 1
            if expo == -2.0:
                v = scale / (x * x)
            elif expo == -1.0:
                v = scale / x
            else:
                v = scale * x**expo
            for c in range(thresholds.size):
                if x < thresholds[c]:
                    out[i, c] += v


def step_path_from_jumps(jumps, n):
    """Right-continuous step function of the jumps, sampled at k/n."""
    if int(n) < 1:
        raise DomainError("grid size n must be at least 1")
    grid = np.arange(n + 1) / n
    values = np.zeros(n + 1)
    if len(jumps):
        cum = np.cumsum(jumps.jump_sizes)
        # jumps with time <= k/n
        counts = np.searchsorted(jumps.jump_times, grid, side="right")
        hit = counts > 0
        values[hit] = cum[counts[hit] - 1]
    return PathGrid(values, JUMPS, {"eta": jumps.eta, "n": n})


def _check_subordination(alpha, kappa):
    if not (0.0 < alpha < 2.0):
        raise DomainError(f"subordination needs alpha in (0, 2), got {alpha}")
    if not kappa > 0:
        raise DomainError("kappa must be positive")


def subordinator_increments(alpha, kappa, n, n_paths, rng):
    """Increments over 1/n of the (alpha/2)-stable subordinator with Laplace
    exponent kappa 2^(alpha/2) lam^(alpha/2)."""
    _check_subordination(alpha, kappa)
    const = kappa * 2.0 ** (0.5 * alpha) / n
    return sample_one_sided(0.5 * alpha, const, rng, size=(n_paths, n))


def simulate_subordinated(alpha, kappa, n, rng, refine=4):
    """One path of Z = W o sigma on the grid k/n.

    sigma is drawn on the grid, then W is drawn jointly at the merged set of
    `refine * n` uniform nodes of [0, sigma_1] and the times sigma(k/n). This
    is the same law as building W on the uniform grid and filling in the
    query times by Brownian bridges.
    """
    d_sigma = subordinator_increments(alpha, kappa, n, 1, rng)[0]
    sigma = np.concatenate([[0.0], np.cumsum(d_sigma)])
    horizon = sigma[-1]
    m = refine * n
    w_times = np.arange(m + 1) * (horizon / m)
    times = np.concatenate([w_times, sigma])
    order = np.argsort(times, kind="stable")
    t_sorted = times[order]
    dt = np.diff(t_sorted)
    w_sorted = np.concatenate([[0.0], np.cumsum(np.sqrt(dt) * rng.standard_normal(dt.size))])
    w_all = np.empty_like(w_sorted)
    w_all[order] = w_sorted
    return SubordinatedPath(sigma, w_all[: m + 1], w_all[m + 1 :], alpha, kappa)


def simulate_subordinated_batch(alpha, kappa, n, n_paths, rng):
    """(sigma, Z) arrays of shape (n_paths, n + 1); Z given sigma has independent
    N(0, d sigma) increments."""
    d_sigma = subordinator_increments(alpha, kappa, n, n_paths, rng)
    sigma = np.zeros((n_paths, n + 1))
    np.cumsum(d_sigma, axis=1, out=sigma[:, 1:])
    z = np.zeros((n_paths, n + 1))
    np.cumsum(np.sqrt(d_sigma) * rng.standard_normal((n_paths, n)), axis=1, out=z[:, 1:])
    return sigma, z


def add_drift(path, mu):
    """values[k] + mu k / n."""
    values = path.values + mu * (np.arange(path.n + 1) / path.n)
    return PathGrid(values, path.method, dict(path.provenance, drift=mu))


__all__ = [
    "PathGrid",
    "JumpSet",
    "SubordinatedPath",
    "simulate_grid",
    "simulate_grid_batch",
    "simulate_jumps",
    "sp_from_jumps",
    "sample_sp_truncated",
    "step_path_from_jumps",
    "simulate_subordinated",
    "simulate_subordinated_batch",
    "add_drift",
]
