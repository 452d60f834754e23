"""Command-line front end: `stablevar {constants,smallball,verify,simulate,pvar}`.

Exit codes: 0 success, 1 verification failure, 2 domain error, 3 infeasible
statistics, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .constants import constants_report
from .errors import DomainError, InfeasibleError
from .estimator import ROUTES, MCConfig, estimate_smallball
from .path_sim import simulate_grid, simulate_jumps, simulate_subordinated, step_path_from_jumps
from .rng import stream
from .stable_core import from_levy_measure, from_subordinator, from_symmetric
from .variation import block_pvars, holder_seminorm, oscillation, pvar_dp, pvar_mesh, sup_norm

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3, 4
OUTPUT_ENV = "STABLEVAR_OUTPUT_DIR"
DEFAULT_OUTPUT = "stablevar_out"
CSV_COLUMNS = ("epsilon", "hits", "p_hat", "se", "k_hat", "k_lo", "k_hi")

SMALLBALL_DEFAULTS = {
    "alpha": None,
    "kappa": 1.0,
    "subordinator": False,
    "c_minus": None,
    "c_plus": None,
    "seminorm": "pvar:2",
    "epsilons": None,
    "n_paths": 10_000,
    "grid_n": 4096,
    "seed": 0,
    "eta": 1e-4,
    "threads": 1,
    "block_size": 4096,
    "route": "auto",
    "level": 0.999,
    "pilot": True,
    "refine_check": False,
    "refine_fraction": 0.1,
}


def fmt(x):
    """Locale-independent double with 17 significant digits; None as nan."""
    if x is None:
        return "nan"
    return "%.17g" % float(x)


def config_hash(params):
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


class Manifest:
    """manifest.json, written with status "incomplete" before any output."""

    def __init__(self, out_dir, command, params, seed):
        self.path = Path(out_dir) / "manifest.json"
        self.start = time.time()
        self.data = {
            "command": command,
            "parameters": params,
            "master_seed": seed,
            "version": __version__,
            "config_hash": config_hash(params),
            "started_at": time.strftime("%Y-%m-%dT%H:%M:%S%z", time.localtime(self.start)),
            "wall_clock_seconds": None,
            "outputs": [],
            "status": "incomplete",
        }
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        self.flush()

    def flush(self):
        write_text(self.path, dump_json(self.data))

    def add(self, name):
        self.data["outputs"].append(name)
        self.flush()

    def complete(self):
        self.data["status"] = "complete"
        self.data["wall_clock_seconds"] = time.time() - self.start
        self.flush()


# ---------------------------------------------------------------------------
# law construction shared by several commands


def _add_law_flags(p, alpha_required=True):
    p.add_argument("--alpha", type=float, required=alpha_required, default=None)
    p.add_argument("--kappa", type=float, default=None, help="scale of the symmetric law or subordinator")
    p.add_argument("--subordinator", action="store_true", default=None, help="one-sided stable subordinator")
    p.add_argument("--c-minus", type=float, default=None, help="Levy measure weight on the negative half-line")
    p.add_argument("--c-plus", type=float, default=None, help="Levy measure weight on the positive half-line")


def build_law(alpha, kappa=None, subordinator=False, c_minus=None, c_plus=None):
    if alpha is None:
        raise DomainError("--alpha is required")
    if c_minus is not None or c_plus is not None:
        if subordinator:
            raise DomainError("give either --subordinator or the Levy measure, not both")
        return from_levy_measure(alpha, c_minus or 0.0, c_plus or 0.0)
    kappa = 1.0 if kappa is None else kappa
    if subordinator:
        return from_subordinator(alpha, kappa)
    return from_symmetric(alpha, kappa)


# ---------------------------------------------------------------------------
# commands


def cmd_constants(args):
    law = build_law(args.alpha, args.kappa, args.subordinator, args.c_minus, args.c_plus)
    rep = constants_report(law, args.p, cp_upper=args.cp_upper).to_dict()
    rep["law"] = law.describe()
    text = dump_json(rep)
    if args.output:
        write_text(args.output, text)
    sys.stdout.write(text)
    return EXIT_OK


def _parse_floats(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if v.strip()]


def resolve_smallball_params(args):
    """Defaults, then the JSON config file, then explicitly given flags."""
    params = dict(SMALLBALL_DEFAULTS)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(params)
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        params.update(loaded)
    for key in SMALLBALL_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    params["epsilons"] = _parse_floats(params["epsilons"])
    if not params["epsilons"]:
        raise DomainError("no epsilon values given (--epsilons)")
    return params


def table_csv(rows):
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([fmt(r.epsilon), str(r.hits), fmt(r.p_hat), fmt(r.se), fmt(r.k_hat), fmt(r.k_lo), fmt(r.k_hi)])
    return buf.getvalue()


def cmd_smallball(args):
    params = resolve_smallball_params(args)
    law = build_law(params["alpha"], params["kappa"], params["subordinator"], params["c_minus"], params["c_plus"])
    cfg = MCConfig(
        n_paths=params["n_paths"],
        grid_n=params["grid_n"],
        master_seed=params["seed"],
        eta=params["eta"],
        epsilons=params["epsilons"],
        threads=params["threads"],
        block_size=params["block_size"],
        route=params["route"],
        level=params["level"],
        pilot=params["pilot"],
        refine_check=params["refine_check"],
        refine_fraction=params["refine_fraction"],
    )
    out_dir = _output_dir(args)
    # the thread count cannot change results, so it stays out of the hash
    hashed = {k: v for k, v in params.items() if k != "threads"}
    manifest = Manifest(out_dir, "smallball", hashed, params["seed"])
    manifest.data["threads"] = params["threads"]
    manifest.flush()
    est = estimate_smallball(law, params["seminorm"], cfg)
    report = est.to_dict()
    report["config"].pop("threads", None)
    write_text(Path(out_dir) / "estimate.json", dump_json(report))
    manifest.add("estimate.json")
    write_text(Path(out_dir) / "table.csv", table_csv(est.rows))
    manifest.add("table.csv")
    manifest.complete()
    sys.stdout.write(table_csv(est.rows))
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_suite

    checks = run_suite(args.suite)
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        failed += not c.passed
        print(f"[{status}] {args.suite}: {c.name} - {c.detail}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def cmd_simulate(args):
    law = build_law(args.alpha, args.kappa, args.subordinator, args.c_minus, args.c_plus)
    if args.n < 1:
        raise DomainError("--n must be at least 1")
    params = {
        "law": law.describe(),
        "n": args.n,
        "seed": args.seed,
        "route": args.route,
        "eta": args.eta,
    }
    out_dir = _output_dir(args)
    manifest = Manifest(out_dir, "simulate", params, args.seed)
    rng = stream(args.seed, "simulate", args.route)
    if args.route == "grid":
        values = simulate_grid(law, args.n, rng).values
    elif args.route == "jumps":
        values = step_path_from_jumps(simulate_jumps(law, args.eta, rng), args.n).values
    else:
        if law.is_gaussian or not law.is_symmetric:
            raise DomainError("subordination needs a symmetric law with alpha < 2")
        values = simulate_subordinated(law.alpha, law.kappa, args.n, rng).values
    t = np.arange(args.n + 1) / args.n
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t", "value"))
    for ti, vi in zip(t, values):
        w.writerow((fmt(ti), fmt(vi)))
    name = args.output or "path.csv"
    write_text(Path(out_dir) / name, buf.getvalue())
    manifest.add(name)
    manifest.complete()
    return EXIT_OK


def read_path_csv(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise DomainError(f"malformed CSV: {exc}") from exc
    if not rows:
        raise DomainError("malformed CSV: empty file")
    if rows[0] and rows[0][0].strip().lower() == "t":
        rows = rows[1:]
    try:
        data = np.array([[float(a), float(b)] for a, b in rows], dtype=float)
    except ValueError as exc:
        raise DomainError(f"malformed CSV: expected 't,value' rows ({exc})") from exc
    if data.shape[0] < 1 or not np.all(np.isfinite(data)):
        raise DomainError("malformed CSV: no finite rows")
    if np.any(np.diff(data[:, 0]) < 0):
        raise DomainError("malformed CSV: times must be nondecreasing")
    return data[:, 0], data[:, 1]


def cmd_pvar(args):
    if not args.p >= 1.0:
        raise DomainError(
            f"p = {args.p} < 1: grid p-variation of a path is only meaningful for p >= 1; "
            "below 1 the variation of any non-step path is infinite (pure-jump regime)"
        )
    t, x = read_path_csv(args.input)
    res = pvar_dp(x, args.p)
    out = {
        "p": args.p,
        "n_points": int(x.size),
        "pvar": res.value,
        "pvar_norm": res.norm,
        "optimal_partition_size": len(res.optimal_indices),
        "sup": sup_norm(x),
        "oscillation": oscillation(x),
    }
    if x.size >= 2 and t[-1] > t[0] and np.allclose(np.diff(t), (t[-1] - t[0]) / (x.size - 1)):
        out["holder"] = holder_seminorm(x, args.p, n=(x.size - 1) / (t[-1] - t[0]))
    if args.mesh is not None:
        out["pvar_mesh"] = pvar_mesh(x, args.p, args.mesh)
    if args.blocks is not None:
        bd = block_pvars(x, args.p, args.blocks)
        out["blocks"] = {"values": list(bd.values), "boundaries": list(bd.boundaries), "total": bd.total}
    sys.stdout.write(dump_json(out))
    return EXIT_OK


def _output_dir(args):
    return args.output_dir or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="stablevar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stablevar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="closed-form exponents, constants and bounds")
    _add_law_flags(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--cp-upper", type=float, default=None, help="user-supplied upper bound for c_p")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("smallball", help="Monte Carlo small-ball probabilities")
    p.add_argument("--config", default=None, help="JSON file with the same keys as the flags")
    _add_law_flags(p, alpha_required=False)
    p.add_argument("--seminorm", default=None, help="pvar:P, holder:P, sup, osc or l2")
    p.add_argument("--epsilons", default=None, help="comma-separated list")
    p.add_argument("--n-paths", dest="n_paths", type=int, default=None)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--block-size", dest="block_size", type=int, default=None)
    p.add_argument("--route", choices=ROUTES, default=None)
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--no-pilot", dest="pilot", action="store_false", default=None)
    p.add_argument("--refine-check", dest="refine_check", action="store_true", default=None)
    p.add_argument("--refine-fraction", dest="refine_fraction", type=float, default=None)
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_smallball)

    from .verify import SUITES

    p = sub.add_parser("verify", help="pinned-seed verification suites")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="simulate one path to t,value CSV")
    _add_law_flags(p)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--route", choices=("grid", "jumps", "subordination"), default="grid")
    p.add_argument("--eta", type=float, default=1e-4)
    p.add_argument("--output", default=None, help="file name inside the output directory")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pvar", help="semi-norms of a t,value CSV path")
    p.add_argument("--input", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mesh", type=int, default=None, help="max index gap of the partitions")
    p.add_argument("--blocks", type=int, default=None, help="equal blocks for the block decomposition")
    p.set_defaults(func=cmd_pvar)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, json.JSONDecodeError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
