"""Command line: ``wqcopt run | estimate | compare | zoo``.

Exit status: 0 success, 1 solver abort, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from .. import conditions
from ..functions import OBJECTIVE_NAMES, make_entry
from ..solvers import METHODS
from .runner import (
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    build_spec,
    compare,
    estimate,
    parse_config,
    run_spec_dict,
)

RUN_KEYS = ("objective", "solver", "iters", "L", "alpha", "mu", "eps", "cycles", "x0", "seed",
            "inner-tol", "inner-max", "record-every", "out", "report", "plot", "dim", "kappa")


def _objective_args(p):
    p.add_argument("--objective", help=f"one of: {', '.join(OBJECTIVE_NAMES)}")
    p.add_argument("--dim", type=int, help="dimension for quad/quad-rot/sphere_quartic")
    p.add_argument("--kappa", type=float, help="condition number for quad/quad-rot")
    p.add_argument("--seed", type=int, help="seed for the objective and x0 (default 0)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wqcopt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a solver and write its trace")
    p.add_argument("--config", action="append", default=[],
                   help="flat key = value file; repeat for a batch (flags override every file)")
    _objective_args(p)
    p.add_argument("--solver", choices=METHODS)
    p.add_argument("--iters", type=int, help="iterations T (per cycle for cg-restart)")
    p.add_argument("--L", type=float, help="gradient Lipschitz constant (default: zoo value)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--eps", type=float, help="target accuracy for cg-restart")
    p.add_argument("--cycles", type=int)
    p.add_argument("--x0", help="'default', 'radius:r' or comma-separated coordinates")
    p.add_argument("--inner-tol", type=float)
    p.add_argument("--inner-max", type=int)
    p.add_argument("--record-every", type=int)
    p.add_argument("--out", help="trace CSV path")
    p.add_argument("--report", help="bound report JSON path")
    p.add_argument("--plot", help="SVG path")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("estimate", help="estimate a condition constant by sampling")
    _objective_args(p)
    p.add_argument("--condition", required=True, choices=conditions.CONDITIONS)
    p.add_argument("--sampler", choices=("box", "gaussian"), default="box")
    p.add_argument("--low", type=float, help="box lower bound (default: zoo box)")
    p.add_argument("--high", type=float, help="box upper bound (default: zoo box)")
    p.add_argument("--center", help="gaussian center, comma-separated (default: origin)")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--report", "--out", dest="report", help="JSON report path")

    p = sub.add_parser("compare", help="align several traces of one objective")
    p.add_argument("traces", nargs="+")
    p.add_argument("--out", help="combined CSV path (default: stdout)")
    p.add_argument("--plot", help="SVG path")

    sub.add_parser("zoo", help="list objectives and their known constants")
    return parser


def cmd_run(args) -> int:
    overrides = {}
    for key in RUN_KEYS:
        v = getattr(args, key.replace("-", "_"))
        if v is not None:
            overrides[key] = str(v)
    bases = [parse_config(path) for path in args.config] or [{}]
    specs = [build_spec({**base, **overrides}).to_dict() for base in bases]
    if len(specs) > 1 and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_spec_dict, specs))
    else:
        results = [run_spec_dict(s) for s in specs]
    for status, line in results:
        print(line, file=sys.stderr if status else sys.stdout)
    return max(status for status, _ in results)


def cmd_estimate(args) -> int:
    if not args.objective:
        raise UsageError("no objective given (--objective)")
    entry = make_entry(args.objective, args.dim, args.kappa, args.seed or 0)
    if args.sampler == "box":
        low = entry.box[0] if args.low is None else args.low
        high = entry.box[1] if args.high is None else args.high
        sampler = conditions.box(low, high, args.samples, args.sample_seed)
    else:
        center = 0.0 if args.center is None else [float(v) for v in args.center.split(",")]
        sampler = conditions.gaussian(center, args.scale, args.samples, args.sample_seed)
    est = estimate(args.objective, args.condition, sampler, args.dim, args.kappa, args.seed or 0,
                   args.report)
    d = est.as_dict()
    print(f"{args.objective} {d['condition']}: constant={d['constant']:.10g} raw_inf={d['raw_inf']:.10g} "
          f"witness={d['witness']} ({d['verdict']}, {d['samples']} samples, seed {d['seed']})")
    return EXIT_OK


def cmd_compare(args) -> int:
    rows = compare(args.traces, args.out, args.plot)
    if not args.out:
        for row in rows:
            print(",".join(row))
    return EXIT_OK


def cmd_zoo(args) -> int:
    def show(v):
        return "-" if v is None else f"{v:.6g}"

    print(f"{'name':<18} {'dim':>4} {'L':>10} {'alpha':>6} {'mu_qg':>10} {'f*':>10}  notes")
    for name in OBJECTIVE_NAMES:
        e = make_entry(name)
        o = e.objective
        print(f"{name:<18} {o.dim:>4} {show(e.run_L):>10} {show(e.alpha_ref):>6} "
              f"{show(e.mu_qg_ref):>10} {show(o.f_star):>10}  {e.notes}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "estimate": cmd_estimate, "compare": cmd_compare, "zoo": cmd_zoo}
    try:
        return handler[args.command](args)
    except (UsageError, KeyError) as err:
        msg = err.args[0] if err.args else str(err)
        print(f"wqcopt: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
