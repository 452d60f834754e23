"""Monte Carlo estimators: small-ball probabilities, Laplace transforms,
tail indices and the statistical witnesses for the p-variation results.

All randomness comes from fixed-size replicate blocks. Block b of a run with
tag T reads stream(master_seed, T, b), and block results are reduced in block
order, so output is bitwise independent of the number of worker threads.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit
from scipy import stats

from . import __version__
from .constants import gamma_exponent
from .errors import DomainError, InfeasibleError
from .path_sim import (
    DEFAULT_ETA,
    DEFAULT_GRID_N,
    sample_sp_truncated,
    simulate_grid_batch,
    simulate_jumps,
    simulate_subordinated_batch,
    sp_from_jumps,
    step_path_from_jumps,
)
from .rng import block_sizes, stream
from .stable_core import sample_one_sided, sample_stable, sp_law
from .variation import (
    _holder_times,
    _holder_uniform,
    jump_p_sum,
    pvar_dp,
    pvar_halves,
    pvar_values,
)

ROUTE_AUTO = "auto"
ROUTE_GRID = "grid"
ROUTE_JUMPS = "jumps"
ROUTE_SUBORDINATION = "subordination"
ROUTE_DIRECT = "direct"
ROUTE_BRIDGE = "bridge"
ROUTES = (ROUTE_AUTO, ROUTE_GRID, ROUTE_JUMPS, ROUTE_SUBORDINATION, ROUTE_DIRECT, ROUTE_BRIDGE)

MIN_HITS = 10
FIT_NOTE = "log p_hat = -K eps^(-gamma) + c; c is a heuristic pre-asymptotic correction"


@dataclass
class MCConfig:
    n_paths: int = 10_000
    grid_n: int = DEFAULT_GRID_N
    master_seed: int = 0
    eta: float = DEFAULT_ETA
    epsilons: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    threads: int = 1
    block_size: int = 4096
    route: str = ROUTE_AUTO
    level: float = 0.999
    pilot: bool = True
    refine_check: bool = False
    refine_fraction: float = 0.1

    def __post_init__(self):
        if int(self.n_paths) < 1:
            raise DomainError("n_paths must be at least 1")
        if int(self.grid_n) < 2:
            raise DomainError("grid_n must be at least 2")
        if int(self.block_size) < 1:
            raise DomainError("block_size must be at least 1")
        if int(self.threads) < 1:
            raise DomainError("threads must be at least 1")
        if not self.eta > 0:
            raise DomainError("eta must be positive")
        if not 0.0 < self.level < 1.0:
            raise DomainError("level must lie in (0, 1)")
        if self.route not in ROUTES:
            raise DomainError(f"unknown route {self.route!r}; choose from {ROUTES}")
        if any(not e > 0 for e in self.epsilons):
            raise DomainError("every epsilon must be positive")
        if any(lam < 0 for lam in self.lambdas):
            raise DomainError("every lambda must be nonnegative")
        self.n_paths = int(self.n_paths)
        self.grid_n = int(self.grid_n)
        self.block_size = int(self.block_size)
        self.threads = int(self.threads)

    def to_dict(self):
        return asdict(self)


def run_blocks(cfg, tag, total, work):
    """Apply work(rng, size, block_index) to every replicate block, in order."""
    sizes = block_sizes(total, cfg.block_size)

    def one(b):
        return work(stream(cfg.master_seed, tag, b), sizes[b], b)

    if cfg.threads == 1 or len(sizes) == 1:
        return [one(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(one, range(len(sizes))))


# ---------------------------------------------------------------------------
# semi-norms


@dataclass(frozen=True)
class Seminorm:
    kind: str
    p: float | None = None

    @property
    def tag(self):
        return self.kind if self.p is None else f"{self.kind}:{self.p:g}"


_KINDS = {"pvar": True, "holder": True, "sup": False, "osc": False, "oscillation": False, "l2": False}


def parse_seminorm(text):
    """'pvar:2', 'holder:3', 'sup', 'osc' or 'l2'."""
    if isinstance(text, Seminorm):
        return text
    kind, _, arg = str(text).strip().lower().partition(":")
    if kind not in _KINDS:
        raise DomainError(f"unknown semi-norm {text!r}")
    kind = "osc" if kind == "oscillation" else kind
    if _KINDS[kind]:
        if not arg:
            raise DomainError(f"semi-norm {kind} needs an exponent, e.g. {kind}:2")
        p = float(arg)
        if not p > 0:
            raise DomainError("the exponent must be positive")
        return Seminorm(kind, p)
    if arg:
        raise DomainError(f"semi-norm {kind} takes no exponent")
    return Seminorm(kind)


def seminorm_gamma(law, sn):
    """Small-ball exponent for (law, semi-norm)."""
    if sn.kind == "pvar":
        return gamma_exponent(law.alpha, sn.p, law.is_subordinator_abs)
    if sn.kind == "holder":
        if not sn.p > max(1.0, law.alpha):
            raise DomainError("the Hoelder semi-norm needs p > max(1, alpha)")
        return gamma_exponent(law.alpha, sn.p)
    return law.alpha


def grid_norms(paths, sn):
    """Semi-norm of every row of a (n_paths, n + 1) array of grid paths."""
    if sn.kind == "pvar":
        return pvar_values(paths, sn.p) ** (1.0 / sn.p)
    if sn.kind == "sup":
        return np.max(np.abs(paths), axis=1)
    if sn.kind == "osc":
        return paths.max(axis=1) - paths.min(axis=1)
    if sn.kind == "l2":
        return np.sqrt(np.mean(paths[:, :-1] ** 2, axis=1))
    if sn.kind == "holder":
        n = float(paths.shape[1] - 1)
        return np.array([_holder_uniform(np.ascontiguousarray(row), float(sn.p), n) for row in paths])
    raise DomainError(f"unsupported semi-norm {sn.kind}")


def select_route(law, sn, requested=ROUTE_AUTO):
    a = law.alpha
    if requested != ROUTE_AUTO:
        if requested == ROUTE_JUMPS and (law.is_gaussian or sn.kind != "pvar" or not a < sn.p <= 1.0):
            raise DomainError("the jump route needs alpha < p <= 1 and the p-variation")
        if requested == ROUTE_SUBORDINATION and (law.is_gaussian or not law.is_symmetric):
            raise DomainError("subordination needs a symmetric law with alpha < 2")
        if requested == ROUTE_DIRECT and not (sn.kind == "pvar" and law.is_subordinator_abs and sn.p >= 1.0):
            raise DomainError("the direct route needs a subordinator |Z| and p >= 1")
        if requested == ROUTE_BRIDGE and not (law.is_gaussian and sn.kind == "sup"):
            raise DomainError("the bridge route is for the Brownian sup norm")
        return requested
    if sn.kind == "pvar":
        if sn.p < 1.0 and not a < sn.p:
            raise DomainError(f"p <= alpha (p={sn.p}, alpha={a}): the p-variation is infinite")
        if law.is_subordinator_abs and sn.p >= 1.0:
            return ROUTE_DIRECT
        if not law.is_gaussian and a < sn.p <= 1.0:
            return ROUTE_JUMPS
        if sn.p < 1.0:
            raise DomainError("grid p-variation needs p >= 1")
    if law.is_gaussian and sn.kind == "sup":
        return ROUTE_BRIDGE
    return ROUTE_GRID


# ---------------------------------------------------------------------------
# Brownian sup norm with bridge correction


@njit(cache=True)
def _bridge_update(levels, var_step, x0, incs, logw, alive):
    """Walk each live path through its increments, accumulating per level the
    log probability that the Brownian bridge between grid nodes stays in the band."""
    n_paths, steps = incs.shape
    top = levels[levels.size - 1]
    for i in range(n_paths):
        if not alive[i]:
            continue
        x = x0[i]
        for s in range(steps):
            y = x + incs[i, s]
            if abs(y) > top:
                alive[i] = False
                for c in range(levels.size):
                    logw[i, c] = -np.inf
                break
            for c in range(levels.size):
                e = levels[c]
                if logw[i, c] == -np.inf:
                    continue
                if abs(y) > e:
                    logw[i, c] = -np.inf
                    continue
                # crossing probabilities below exp(-60) are dropped
                up = 2.0 * (e - x) * (e - y) / var_step
                if up < 60.0:
                    logw[i, c] += math.log1p(-math.exp(-up))
                dn = 2.0 * (e + x) * (e + y) / var_step
                if dn < 60.0:
                    logw[i, c] += math.log1p(-math.exp(-dn))
            x = y
        x0[i] = x


def _bridge_block(rng, size, levels, n, scale, chunk=256):
    """Per-path (bridge weight, grid sup <= level) for every level."""
    h_var = scale * scale / n
    sd = math.sqrt(h_var)
    logw = np.zeros((size, levels.size))
    alive = np.ones(size, dtype=np.bool_)
    x0 = np.zeros(size)
    done = 0
    while done < n:
        steps = min(chunk, n - done)
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        incs = sd * rng.standard_normal((idx.size, steps))
        lw = logw[idx]
        al = alive[idx]
        xs = x0[idx]
        _bridge_update(levels, h_var, xs, incs, lw, al)
        logw[idx] = lw
        alive[idx] = al
        x0[idx] = xs
        done += steps
    inside = np.isfinite(logw)
    return np.exp(logw), inside


# ---------------------------------------------------------------------------
# small-ball estimation


@dataclass
class SmallBallRow:
    epsilon: float
    hits: int
    p_hat: float
    se: float
    ci_lo: float
    ci_hi: float
    k_hat: float | None
    k_lo: float | None
    k_hi: float | None


@dataclass
class SmallBallEstimate:
    rows: list
    gamma: float
    route: str
    seminorm: str
    law: dict
    config: dict
    n_paths: int
    fit: dict | None = None
    dropped_epsilons: list = field(default_factory=list)
    refine: dict | None = None
    notes: list = field(default_factory=list)
    version: str = __version__

    def to_dict(self):
        return asdict(self)


def wilson_interval(hits, n, level):
    """Wilson score interval for a binomial proportion."""
    z = stats.norm.ppf(0.5 + 0.5 * level)
    if n == 0:
        return 0.0, 1.0
    ph = hits / n
    denom = 1.0 + z * z / n
    centre = (ph + z * z / (2 * n)) / denom
    half = z * math.sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if hits == 0 else max(0.0, centre - half)
    hi = 1.0 if hits == n else min(1.0, centre + half)
    return lo, hi


def _k_transform(eps, gamma, prob):
    if prob <= 0.0:
        return math.inf
    if prob >= 1.0:
        return 0.0
    return -(eps**gamma) * math.log(prob)


def _rows_from_stats(epsilons, hits, p_hats, ses, los, his, gamma):
    rows = []
    for e, h, ph, se, lo, hi in zip(epsilons, hits, p_hats, ses, los, his):
        if h >= MIN_HITS:
            # -eps^gamma log(.) is decreasing, so the interval ends swap
            k, klo, khi = _k_transform(e, gamma, ph), _k_transform(e, gamma, hi), _k_transform(e, gamma, lo)
        else:
            k = klo = khi = None
        rows.append(SmallBallRow(float(e), int(h), float(ph), float(se), float(lo), float(hi), k, klo, khi))
    return rows


def fit_constant(rows, gamma):
    """Least squares of log p_hat on -eps^(-gamma) over rows with enough hits."""
    pts = [(r.epsilon, r.p_hat) for r in rows if r.hits >= MIN_HITS and 0.0 < r.p_hat < 1.0]
    if len(pts) < 2:
        return None
    x = np.array([-(e ** (-gamma)) for e, _ in pts])
    y = np.array([math.log(ph) for _, ph in pts])
    design = np.column_stack([x, np.ones_like(x)])
    (k, c), *_ = np.linalg.lstsq(design, y, rcond=None)
    return {"K": float(k), "c": float(c), "n_points": len(pts), "note": FIT_NOTE}


class _Sampler:
    """Draws the semi-norm of a block of replicates for one (law, semi-norm, route)."""

    def __init__(self, law, sn, route, grid_n, eta, levels):
        self.law, self.sn, self.route = law, sn, route
        self.grid_n, self.eta = grid_n, eta
        self.levels = np.sort(np.asarray(levels, dtype=float))

    def norms(self, rng, size):
        law, sn = self.law, self.sn
        if self.route == ROUTE_DIRECT:
            # a monotone path has p-variation |Z_1|^p for p >= 1
            return np.abs(sample_stable(law, 1.0, rng, size=size))
        if self.route == ROUTE_JUMPS:
            return sample_sp_truncated(law, sn.p, [self.eta], size, rng)[:, 0] ** (1.0 / sn.p)
        if self.route == ROUTE_SUBORDINATION:
            _, z = simulate_subordinated_batch(law.alpha, law.kappa, self.grid_n, size, rng)
            return grid_norms(z, sn)
        return grid_norms(simulate_grid_batch(law, self.grid_n, size, rng), sn)

    def block(self, rng, size):
        """(weights, indicators), both (size, n_levels)."""
        if self.route == ROUTE_BRIDGE:
            return _bridge_block(rng, size, self.levels, self.grid_n, self.law.gauss_scale_a)
        inside = self.norms(rng, size)[:, None] <= self.levels[None, :]
        return inside.astype(float), inside


def _collect(cfg, tag, total, sampler):
    blocks = run_blocks(cfg, tag, total, lambda rng, size, b: sampler.block(rng, size))
    weights = np.concatenate([w for w, _ in blocks], axis=0)
    inside = np.concatenate([i for _, i in blocks], axis=0)
    return weights, inside


def _summaries(weights, inside, weighted, level):
    n = weights.shape[0]
    hits = inside.sum(axis=0).astype(int)
    out = []
    for c in range(weights.shape[1]):
        if weighted:
            col = weights[:, c]
            ph = math.fsum(col) / n
            var = math.fsum((col - ph) ** 2) / max(n - 1, 1)
            se = math.sqrt(var / n)
            z = stats.norm.ppf(0.5 + 0.5 * level)
            lo, hi = max(0.0, ph - z * se), min(1.0, ph + z * se)
        else:
            ph = hits[c] / n
            se = math.sqrt(ph * (1.0 - ph) / n)
            lo, hi = wilson_interval(int(hits[c]), n, level)
        out.append((int(hits[c]), ph, se, lo, hi))
    return out


def _pilot(law, sn, route, cfg, levels, gamma):
    """Projected main-run hits per level from a pilot of n_paths/100 replicates.

    Levels reached by the pilot are projected from its hit counts. Below the
    smallest pilot value, the lower tail of the pilot sample is fitted by
    log F = -K x^(-gamma) + c and extrapolated.
    Returns (feasible mask, smallest feasible epsilon or None, pilot size).
    """
    n_pilot = max(1, cfg.n_paths // 100)
    plain = ROUTE_GRID if route == ROUTE_BRIDGE else route
    sampler = _Sampler(law, sn, plain, cfg.grid_n, cfg.eta, levels)
    vals = np.sort(np.concatenate(run_blocks(cfg, "pilot", n_pilot, lambda rng, size, b: sampler.norms(rng, size))))
    scale = cfg.n_paths / n_pilot
    fit = _tail_fit(vals, gamma)
    projected = []
    for e in levels:
        hits = np.searchsorted(vals, e, side="right")
        if hits > 0:
            projected.append(hits * scale)
        elif fit is not None:
            k, c = fit
            projected.append(cfg.n_paths * math.exp(-k * e ** (-gamma) + c))
        else:
            projected.append(0.0)
    feasible = np.array(projected) >= MIN_HITS
    need = MIN_HITS / cfg.n_paths
    if fit is not None and math.log(need) < fit[1]:
        best = (fit[0] / (fit[1] - math.log(need))) ** (1.0 / gamma)
    else:
        k = math.ceil(MIN_HITS / scale)
        best = float(vals[k - 1]) if k <= vals.size else None
    return feasible, best, n_pilot


def _tail_fit(vals, gamma, max_points=50):
    # least squares on the lowest order statistics, empirical CDF j / (m + 1)
    m = vals.size
    j = np.arange(1, min(max_points, m // 4) + 1)
    if j.size < 5 or not np.all(vals[j - 1] > 0):
        return None
    x = -(vals[j - 1] ** (-gamma))
    y = np.log(j / (m + 1.0))
    design = np.column_stack([x, np.ones_like(x)])
    (k, c), *_ = np.linalg.lstsq(design, y, rcond=None)
    if not (k > 0 and math.isfinite(c)):
        return None
    return float(k), float(c)


def estimate_smallball(law, seminorm, cfg):
    """Estimate P[||Z|| <= eps] for every eps in cfg.epsilons from one shared sample."""
    sn = parse_seminorm(seminorm)
    if not cfg.epsilons:
        raise DomainError("no epsilon values given")
    gamma = seminorm_gamma(law, sn)
    route = select_route(law, sn, cfg.route)
    levels = sorted(float(e) for e in set(cfg.epsilons))
    notes = []
    dropped = []
    if cfg.pilot:
        feasible, best, n_pilot = _pilot(law, sn, route, cfg, levels, gamma)
        dropped = [e for e, ok in zip(levels, feasible) if not ok]
        if len(dropped) == len(levels):
            raise InfeasibleError(
                f"no epsilon reaches {MIN_HITS} expected hits at n_paths={cfg.n_paths}; "
                f"smallest feasible epsilon from the pilot: {best}",
                smallest_feasible=best,
            )
        if dropped:
            warnings.warn(f"dropping infeasible epsilons {dropped} (pilot of {n_pilot} paths)", stacklevel=2)
        levels = [e for e, ok in zip(levels, feasible) if ok]
    sampler = _Sampler(law, sn, route, cfg.grid_n, cfg.eta, levels)
    weights, inside = _collect(cfg, "main", cfg.n_paths, sampler)
    weighted = route == ROUTE_BRIDGE
    summ = _summaries(weights, inside, weighted, cfg.level)
    rows = _rows_from_stats(levels, *zip(*summ), gamma)
    if weighted:
        notes.append("p_hat is the bridge-corrected grid estimator; hits count grid paths inside the band")
    if route == ROUTE_JUMPS:
        notes.append(f"jumps below eta={cfg.eta} are dropped")
    est = SmallBallEstimate(
        rows=rows,
        gamma=gamma,
        route=route,
        seminorm=sn.tag,
        law=law.describe(),
        config=cfg.to_dict(),
        n_paths=cfg.n_paths,
        fit=fit_constant(rows, gamma),
        dropped_epsilons=dropped,
        notes=notes,
    )
    if cfg.refine_check and route in (ROUTE_GRID, ROUTE_SUBORDINATION, ROUTE_BRIDGE):
        est.refine = _refine_report(law, sn, route, cfg, levels, rows, weighted)
    return est


def _refine_report(law, sn, route, cfg, levels, rows, weighted):
    n_ref = max(1, int(round(cfg.n_paths * cfg.refine_fraction)))
    sampler = _Sampler(law, sn, route, 2 * cfg.grid_n, cfg.eta, levels)
    weights, inside = _collect(cfg, "refine", n_ref, sampler)
    summ = _summaries(weights, inside, weighted, cfg.level)
    out = []
    for row, (_, ph, se, _, _) in zip(rows, summ):
        err = math.sqrt(row.se**2 + se**2)
        change = ph - row.p_hat
        out.append(
            {
                "epsilon": row.epsilon,
                "p_hat_fine": float(ph),
                "se_fine": float(se),
                "change": float(change),
                "flag": bool(abs(change) > 3 * err),
            }
        )
    return {"grid_n": 2 * cfg.grid_n, "n_paths": n_ref, "rows": out}


# ---------------------------------------------------------------------------
# Laplace transforms of S^p


def _mean_se(x):
    n = x.size
    m = math.fsum(x) / n
    var = math.fsum((x - m) ** 2) / max(n - 1, 1)
    return m, math.sqrt(var / n)


def laplace_mc(law, p, lambdas, cfg, direct=True):
    """E[exp(-lam S^p_1)] by jump simulation (truncated at cfg.eta) and by
    direct one-sided stable draws, against the exact exp(-C lam^(alpha/p))."""
    sub = sp_law(law, p)
    lams = np.asarray(lambdas, dtype=float)
    if np.any(lams < 0):
        raise DomainError("lambda must be nonnegative")

    def jump_work(rng, size, b):
        s = sample_sp_truncated(law, p, [cfg.eta], size, rng)[:, 0]
        return np.exp(-np.outer(s, lams))

    def direct_work(rng, size, b):
        s = sample_one_sided(sub.alpha, sub.kappa, rng, size=size)
        return np.exp(-np.outer(s, lams))

    jump = np.concatenate(run_blocks(cfg, "laplace-jumps", cfg.n_paths, jump_work), axis=0)
    dire = np.concatenate(run_blocks(cfg, "laplace-direct", cfg.n_paths, direct_work), axis=0) if direct else None
    rows = []
    for c, lam in enumerate(lams):
        exact = math.exp(-sub.kappa * lam**sub.alpha)
        row = {"lambda": float(lam), "exact": exact}
        routes = [("jump", jump)] + ([("direct", dire)] if direct else [])
        for name, arr in routes:
            m, se = _mean_se(arr[:, c])
            row[f"{name}_mean"] = m
            row[f"{name}_se"] = se
            if lam > 0 and m > 0:
                scale = lam ** (-sub.alpha)
                row[f"{name}_rescaled_log"] = scale * math.log(m)
                row[f"{name}_rescaled_log_se"] = scale * se / m
        rows.append(row)
    return {
        "index": sub.alpha,
        "laplace_const": sub.kappa,
        "rescaled_log_exact": -sub.kappa,
        "eta": cfg.eta,
        "n_paths": cfg.n_paths,
        "rows": rows,
    }


# ---------------------------------------------------------------------------
# Greenwood identity, strict gap and scaled-sum tests


def greenwood_identity_check(law, p, cfg, etas=(1e-2, 1e-3, 1e-4), structural_paths=200):
    """For alpha < p <= 1: the p-variation of a pure-jump path is the sum of its
    p-th jump powers, and S^{p,eta} approaches the exact S^p law as eta drops."""
    if p > 1.0:
        raise DomainError("the jump-sum identity needs p <= 1")
    if law.is_gaussian or not p > law.alpha:
        raise DomainError("the jump-sum identity needs alpha < p")
    rng = stream(cfg.master_seed, "greenwood-structural")
    mismatches = 0
    step_checked = 0
    for _ in range(structural_paths):
        js = simulate_jumps(law, max(etas), rng)
        if jump_p_sum(js, p) != sp_from_jumps(js, p):
            mismatches += 1
        if p == 1.0 and len(js) < 200:
            # a step path on a grid fine enough to separate the jumps
            n = 1 << 16
            path = step_path_from_jumps(js, n)
            if len(np.unique(np.ceil(js.jump_times * n))) == len(js):
                v = pvar_dp(path.values, 1.0).value
                if not math.isclose(v, jump_p_sum(js, 1.0), rel_tol=1e-9, abs_tol=1e-12):
                    mismatches += 1
                step_checked += 1
    etas = sorted(etas, reverse=True)
    sub = sp_law(law, p)
    trunc = np.concatenate(
        run_blocks(cfg, "greenwood-jumps", cfg.n_paths, lambda r, s, b: sample_sp_truncated(law, p, etas, s, r)),
        axis=0,
    )
    direct = np.concatenate(
        run_blocks(cfg, "greenwood-direct", cfg.n_paths, lambda r, s, b: sample_one_sided(sub.alpha, sub.kappa, r, s))
    )
    ks = []
    for c, eta in enumerate(etas):
        res = stats.ks_2samp(trunc[:, c], direct)
        ks.append({"eta": eta, "statistic": float(res.statistic), "pvalue": float(res.pvalue)})
    stat_seq = [k["statistic"] for k in ks]
    return {
        "structural_mismatches": mismatches,
        "step_paths_checked": step_checked,
        "ks": ks,
        "ks_monotone": all(a >= b for a, b in zip(stat_seq, stat_seq[1:])),
    }


def strict_gap_test(law, p, cfg, rel_tol=1e-9):
    """Frequency with which V > V_left + V_right, splitting at the midpoint."""
    if not p > max(1.0, law.alpha):
        raise DomainError("the gap test needs p > max(1, alpha)")
    if cfg.grid_n % 2:
        raise DomainError("grid_n must be even")

    def work(rng, size, b):
        return pvar_halves(simulate_grid_batch(law, cfg.grid_n, size, rng), p)

    res = np.concatenate(run_blocks(cfg, "strict-gap", cfg.n_paths, work), axis=0)
    v, left, right = res[:, 0], res[:, 1], res[:, 2]
    gap = v - left - right
    tol = rel_tol * v
    strict = int(np.sum(gap > tol))
    violations = int(np.sum(gap < -tol))
    rel = np.where(v > 0, gap / np.where(v > 0, v, 1.0), 0.0)
    return {
        "n_paths": cfg.n_paths,
        "grid_n": cfg.grid_n,
        "p": p,
        "strict_gap_frequency": strict / cfg.n_paths,
        "strict_gap_count": strict,
        "superadditivity_violations": violations,
        "mean_relative_gap": math.fsum(rel) / rel.size,
    }


def scaled_sum_ks_test(law, p, cfg, sampler=None, level=0.001):
    """Two-sample KS of V against 2^(-p/alpha)(V' + V''), all independent.

    `sampler(rng, size)` replaces the p-variation draws; by default they are
    grid p-variations of the law at cfg.grid_n.
    """
    if sampler is None:
        if not p > max(1.0, law.alpha):
            raise DomainError("the scaled-sum test needs p > max(1, alpha)")

        def sampler(rng, size):
            return pvar_values(simulate_grid_batch(law, cfg.grid_n, size, rng), p)

    draws = [np.concatenate(run_blocks(cfg, f"ks-{k}", cfg.n_paths, lambda r, s, b: sampler(r, s))) for k in range(3)]
    combined = 2.0 ** (-p / law.alpha) * (draws[1] + draws[2])
    res = stats.ks_2samp(draws[0], combined)
    return {
        "statistic": float(res.statistic),
        "pvalue": float(res.pvalue),
        "level": level,
        "reject": bool(res.pvalue < level),
        "n": cfg.n_paths,
    }


def subordination_bound_check(alpha, kappa, p, cfg):
    """Per path: V_p(Z) <= H^p sigma_1, with H the (1/p)-Hoelder constant of W
    over the points (sigma_k, Z_k). Deterministic, so violations should be 0."""
    if not (0.0 < alpha < 2.0 < p):
        raise DomainError("the subordination bound needs alpha < 2 < p")

    def work(rng, size, b):
        sigma, z = simulate_subordinated_batch(alpha, kappa, cfg.grid_n, size, rng)
        out = np.empty((size, 2))
        for i in range(size):
            lhs = pvar_dp(z[i], p).value
            h = _holder_times(sigma[i], z[i], float(p))
            out[i] = lhs, h**p * math.fsum(np.diff(sigma[i]))
        return out

    res = np.concatenate(run_blocks(cfg, "subordination", cfg.n_paths, work), axis=0)
    lhs, rhs = res[:, 0], res[:, 1]
    violations = int(np.sum(lhs > rhs * (1.0 + 1e-12)))
    return {
        "n_paths": cfg.n_paths,
        "violations": violations,
        "max_ratio": float(np.max(np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), 0.0))),
    }


# ---------------------------------------------------------------------------
# tail index


@dataclass
class TailEstimate:
    k: int
    estimate: float
    ci_lo: float
    ci_hi: float
    n: int


def tail_index(samples, k, level=0.999):
    """Hill estimate of the upper tail exponent from the top k order statistics."""
    x = np.asarray(samples, dtype=float)
    k = int(k)
    if k < 20:
        raise DomainError("the Hill estimator needs k >= 20")
    if k >= x.size:
        raise DomainError(f"k={k} must be smaller than the sample size {x.size}")
    top = np.partition(x, x.size - k - 1)[x.size - k - 1 :]
    top.sort()
    threshold = top[0]
    if not threshold > 0:
        raise DomainError("the top order statistics must be positive")
    hill = math.fsum(np.log(top[1:]) - math.log(threshold)) / k
    est = 1.0 / hill
    z = stats.norm.ppf(0.5 + 0.5 * level)
    return TailEstimate(k, est, est * (1.0 - z / math.sqrt(k)), est * (1.0 + z / math.sqrt(k)), x.size)
