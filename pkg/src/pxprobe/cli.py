"""Command-line front end.

Subcommands: ``generate``, ``greedy``, ``diameter``, ``hull``, ``density``.
Every run subcommand writes a JSON report ``{command, seed, input_digest,
payload}`` to ``--report`` (or stdout). Reports are byte-identical for the
same input, seed and flags; ``--timing`` adds a ``wall_time`` field.

Exit codes: 0 report written, 2 usage error, 3 bad input data, 4 I/O error.
"""
import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__, svg
from .density import counterexample_set, k_density_centers
from .explorer import estimate_diameter, explore
from .geometry import UsageError
from .hull import HullConfig, MODES as HULL_MODES, membership
from .oracles import (
    AdversarialAnnOracle, FiniteSetOracle, load_points, oracle_from_config, save_points,
)

EXIT_USAGE, EXIT_INPUT, EXIT_IO = 2, 3, 4


class InputError(ValueError):
    """Malformed data in an input file or numeric flag."""


# generate ----------------------------------------------------------------

def generate_points(shape, n, d, seed):
    if n < 1:
        raise UsageError("n must be >= 1")
    if shape == "counterexample":
        return counterexample_set(n)
    if d < 1:
        raise UsageError("d must be >= 1")
    rng = np.random.default_rng(seed)
    if shape == "uniform":
        return rng.random((n, d))
    if shape == "circle":
        u = rng.normal(size=(n, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        return 0.5 + 0.4 * u
    if shape == "clusters":
        m = max(1, min(5, n))
        centers = rng.uniform(0.2, 0.8, size=(m, d))
        lab = rng.integers(m, size=n)
        return np.clip(centers[lab] + rng.normal(scale=0.05, size=(n, d)), 0.0, 1.0)
    raise UsageError(f"unknown shape {shape!r}")


# helpers -----------------------------------------------------------------

def _digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _parse_point(text):
    try:
        return np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise InputError(f"cannot parse point {text!r}") from None


def _load(args):
    """(oracle, explicit points or None, digest) from --points or --oracle."""
    if bool(args.points) == bool(getattr(args, "oracle", None)):
        raise UsageError("give exactly one of --points or --oracle")
    if args.points:
        try:
            P = load_points(args.points)
        except (ValueError, UsageError) as exc:
            raise InputError(str(exc)) from None
        return FiniteSetOracle(P), P, _digest(args.points)
    try:
        oracle = oracle_from_config(args.oracle)
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"bad oracle config: {exc}") from None
    P = getattr(oracle, "points", None)
    return oracle, P, _digest(args.oracle)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _echo(args):
    skip = {"func", "report", "svg", "timing"}
    return {"name": args.command,
            "args": {k: v for k, v in sorted(vars(args).items()) if k not in skip}}


def _emit(args, digest, payload, started):
    report = {"command": _echo(args), "seed": args.seed, "input_digest": digest,
              "payload": payload}
    if args.timing:
        report["wall_time"] = time.perf_counter() - started
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.report:
        with open(args.report, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_svg(args, P, dim):
    if args.svg and dim != 2:
        raise UsageError("--svg needs 2-D input")


# commands ----------------------------------------------------------------

def cmd_generate(args):
    P = generate_points(args.shape, args.n, args.d, args.seed)
    save_points(args.out, P)
    return 0


def cmd_greedy(args):
    started = time.perf_counter()
    oracle, P, digest = _load(args)
    _check_svg(args, P, oracle.dim)
    if args.iters < 1:
        raise UsageError("--iters must be >= 1")
    if args.adversarial:
        if not isinstance(oracle, FiniteSetOracle):
            raise UsageError("--adversarial needs a finite point set")
        oracle = AdversarialAnnOracle(oracle)
    trace = explore(oracle, args.iters, mode=args.mode, eps=args.eps,
                    rho=args.rho, max_depth=args.max_depth)
    payload = trace.as_dict()
    payload["oracle_stats"] = oracle.stats.as_dict()
    _emit(args, digest, payload, started)
    if args.svg:
        svg.write(args.svg, svg.render_trace(trace, P))
    return 0


def cmd_diameter(args):
    started = time.perf_counter()
    oracle, _, digest = _load(args)
    est = estimate_diameter(oracle, rho=args.rho, max_depth=args.max_depth)
    _emit(args, digest, est.as_dict(), started)
    return 0


def hull_delta_big(P, given=None):
    """Diameter estimate for the hull runs.

    Uses ``given`` when supplied. Otherwise (points inside the unit cube) three
    times the probing estimate, which is at least the true diameter, clamped to
    the cube diagonal.
    """
    if given is not None:
        if not given > 0:
            raise UsageError("--delta-big must be positive")
        return float(given), "given"
    if np.any(P < 0) or np.any(P > 1):
        raise UsageError("points outside [0,1]^d: pass --delta-big")
    est = estimate_diameter(FiniteSetOracle(P)).estimate
    if est <= 0:
        raise UsageError("single-point set: pass --delta-big")
    return min(3.0 * est, math.sqrt(P.shape[1])), "estimated"


def cmd_hull(args):
    started = time.perf_counter()
    if not args.points:
        raise UsageError("hull needs --points")
    oracle, P, digest = _load(args)
    _check_svg(args, P, oracle.dim)
    q = _parse_point(args.query)
    if len(q) != oracle.dim:
        raise UsageError(f"--query has {len(q)} coordinates, points have {oracle.dim}")
    if not 0 < args.eps <= 1:
        raise UsageError("--eps must lie in (0, 1]")
    dbig, source = hull_delta_big(P, args.delta_big)
    cfg = HullConfig(args.eps, dbig)
    ann = AdversarialAnnOracle(oracle) if args.adversarial else oracle
    run = membership(q, P, cfg, args.mode, ann_oracle=ann)
    payload = run.as_dict()
    payload["delta_big_source"] = source
    _emit(args, digest, payload, started)
    if args.svg:
        svg.write(args.svg, svg.render_hull(run, P))
    return 0


def cmd_density(args):
    started = time.perf_counter()
    if not args.points:
        raise UsageError("density needs --points")
    _, P, digest = _load(args)
    _check_svg(args, P, P.shape[1])
    if not 1 <= args.k <= len(P):
        raise UsageError(f"--k must lie in [1, {len(P)}]")
    out = k_density_centers(P, args.k, planar_mode=args.planar, seed=args.seed,
                            initial_size=args.initial_size)
    _emit(args, digest, out.as_dict(), started)
    if args.svg:
        svg.write(args.svg, svg.render_density(out, P))
    return 0


# parser ------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="pxprobe",
                                 description="Geometry through nearest-neighbour probes.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, oracle=True):
        p.add_argument("--points", help="CSV point file")
        if oracle:
            p.add_argument("--oracle", help="JSON oracle config (instead of --points)")
        p.add_argument("--report", help="JSON report path (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--timing", action="store_true", help="add wall_time to the report")

    g = sub.add_parser("generate", help="write a synthetic point file")
    g.add_argument("--shape", choices=["uniform", "circle", "clusters", "counterexample"],
                   default="uniform")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("greedy", help="greedy permutation by NN probing")
    common(p)
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "ann"], default="exact")
    p.add_argument("--eps", type=float)
    p.add_argument("--adversarial", action="store_true",
                   help="answer ANN queries with the worst legal point")
    p.add_argument("--rho", type=float, default=0.25)
    p.add_argument("--max-depth", type=int, default=20)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("diameter", help="constant-factor diameter estimate")
    common(p)
    p.add_argument("--rho", type=float, default=0.25)
    p.add_argument("--max-depth", type=int, default=20)
    p.set_defaults(func=cmd_diameter, svg=None)

    p = sub.add_parser("hull", help="approximate convex-hull membership")
    common(p, oracle=False)
    p.add_argument("--query", required=True, help="comma-separated coordinates")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--mode", choices=list(HULL_MODES), default="exact-extremal")
    p.add_argument("--delta-big", type=float, help="diameter estimate (default: probed)")
    p.add_argument("--adversarial", action="store_true",
                   help="answer ANN queries with the worst legal point")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("density", help="k-density (balanced Voronoi) clustering")
    common(p, oracle=False)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--planar", action=argparse.BooleanOptionalAction, default=None,
                   help="planar starting sample size (default: d == 2)")
    p.add_argument("--initial-size", type=int, help="override the starting sample size")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_density)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"pxprobe: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as exc:
        print(f"pxprobe: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pxprobe: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
