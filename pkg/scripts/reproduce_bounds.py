"""Run the gd / sesop / cg-restart rate checks and write traces, reports and charts.

    python3 scripts/reproduce_bounds.py --out results/bounds
"""

import argparse
import sys
from pathlib import Path

from wqcopt.harness.runner import build_spec, compare, run, summarize

RUNS = [
    ("abs_one_minus_exp", "gd", {"iters": "10000", "record-every": "10"}),
    ("abs_one_minus_exp", "sesop", {"iters": "1000"}),
    ("quad-rot", "gd", {"iters": "2000"}),
    ("quad-rot", "sesop", {"iters": "300"}),
    ("quad-rot", "cg-restart", {"cycles": "10"}),
    ("quad-ill", "cg-restart", {"cycles": "10"}),
    ("sphere_quartic", "sesop", {"iters": "200"}),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="results/bounds")
    args = p.parse_args(argv)
    out = Path(args.out)
    status = 0
    traces: dict[str, list[str]] = {}
    for name, solver, extra in RUNS:
        stem = out / f"{name}_{solver}"
        spec = build_spec({"objective": name, "solver": solver, **extra, "out": f"{stem}.csv",
                           "report": f"{stem}.report.json", "plot": f"{stem}.svg"})
        outcome = run(spec)
        status = max(status, outcome.status)
        if outcome.report is not None and outcome.report.violated:
            status = max(status, 1)
        print(summarize(spec, outcome))
        traces.setdefault(name, []).append(f"{stem}.csv")
    for name, paths in traces.items():
        if len(paths) > 1:
            compare(paths, out / f"{name}_compare.csv", out / f"{name}_compare.svg")
    print(f"wrote {out}/")
    return status


if __name__ == "__main__":
    sys.exit(main())
