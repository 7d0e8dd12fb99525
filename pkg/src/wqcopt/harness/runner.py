"""Run specifications and the run / estimate / compare jobs behind the CLI."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .. import conditions
from ..core import Trace
from ..functions import ZooEntry, make_entry
from ..solvers import SolverAbort, SolverConfig, cycle_length, run_solver
from . import svg
from .traceio import BoundReport, TraceFormatError, bound_report, fmt, read_trace, write_trace

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_ABORT, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunSpec:
    objective: str
    solver: SolverConfig
    dim: int | None = None
    kappa: float | None = None
    seed: int = 0
    x0: str = "default"
    eps: float | None = None
    out: str | None = None
    report: str | None = None
    plot: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunSpec:
        d = dict(d)
        d["solver"] = SolverConfig(**d["solver"])
        return cls(**d)


def parse_config(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys use flag spelling."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("_", "-")] = value
    return values


def _get(values, key, conv, default=None):
    raw = values.get(key)
    if raw is None or raw == "":
        return default
    try:
        return conv(raw)
    except ValueError as err:
        raise UsageError(f"bad value for {key}: {raw!r}") from err


def build_spec(values: dict[str, Any]) -> RunSpec:
    """Turn merged config/flag values into a RunSpec, filling constants from the zoo."""
    name = values.get("objective")
    if not name:
        raise UsageError("no objective given (--objective)")
    dim = _get(values, "dim", int)
    kappa = _get(values, "kappa", float)
    seed = _get(values, "seed", int, 0)
    entry = _entry(name, dim, kappa, seed)
    method = values.get("solver") or "gd"
    L = _get(values, "L", float, entry.run_L)
    if L is None:
        raise UsageError(f"objective {name!r} has no known Lipschitz constant; pass --L")
    try:
        cfg = SolverConfig(
            method=method,
            L=L,
            T=_get(values, "iters", int, None if method == "cg-restart" else 100),
            alpha=_get(values, "alpha", float, entry.alpha_ref),
            mu=_get(values, "mu", float, entry.mu_qg_ref),
            cycles=_get(values, "cycles", int),
            inner_tol=_get(values, "inner-tol", float, 1e-10),
            inner_max=_get(values, "inner-max", int, 200),
            record_every=_get(values, "record-every", int, 1),
        )
    except ValueError as err:
        raise UsageError(str(err)) from err
    return RunSpec(
        objective=name, solver=cfg, dim=dim, kappa=kappa, seed=seed,
        x0=values.get("x0") or "default", eps=_get(values, "eps", float),
        out=values.get("out"), report=values.get("report"), plot=values.get("plot"),
    )


def _entry(name, dim=None, kappa=None, seed=0) -> ZooEntry:
    try:
        return make_entry(name, dim=dim, kappa=kappa, seed=seed)
    except KeyError as err:
        raise UsageError(err.args[0]) from err


def resolve_x0(spec: str, entry: ZooEntry, seed: int) -> np.ndarray:
    """``default``, ``radius:r`` (seeded point on the sphere around the minimizer) or ``a,b,...``."""
    n = entry.objective.dim
    if spec == "default":
        return entry.x0.copy()
    if spec.startswith("radius:"):
        r = float(spec.split(":", 1)[1])
        center = entry.x_star if entry.x_star is not None else np.zeros(n)
        u = np.random.default_rng(seed).standard_normal(n)
        return center + r * u / np.linalg.norm(u)
    try:
        x0 = np.array([float(v) for v in spec.split(",")])
    except ValueError as err:
        raise UsageError(f"cannot parse x0 {spec!r}") from err
    if x0.shape != (n,):
        raise UsageError(f"x0 has {x0.shape[0]} components, objective {entry.name!r} has dimension {n}")
    return x0


@dataclass
class RunOutcome:
    trace: Trace
    status: int = EXIT_OK
    message: str = ""
    report: BoundReport | None = None
    files: list[str] = field(default_factory=list)


def make_report(trace: Trace, cfg: SolverConfig) -> BoundReport | None:
    if trace.R is None or trace.gaps is None or cfg.alpha is None:
        return None
    if cfg.method in ("cg", "cg-restart") and cfg.mu is None:
        return None
    return bound_report(cfg.method, trace.ks, trace.gaps, cfg.L, trace.R, cfg.alpha, cfg.mu)


def run(spec: RunSpec) -> RunOutcome:
    entry = _entry(spec.objective, spec.dim, spec.kappa, spec.seed)
    x0 = resolve_x0(spec.x0, entry, spec.seed)
    cfg = spec.solver
    if cfg.method == "cg-restart" and spec.eps is None and cfg.cycles is None:
        raise UsageError("cg-restart needs --eps or --cycles")
    eps = spec.eps if spec.eps is not None else 1e-300
    try:
        trace = run_solver(entry.objective, x0, cfg, eps)
        outcome = RunOutcome(trace)
    except SolverAbort as err:
        outcome = RunOutcome(err.trace, EXIT_ABORT, str(err))
    trace = outcome.trace
    if cfg.method == "cg-restart" and "cycle_length" not in trace.meta:
        trace.meta["cycle_length"] = cfg.T or cycle_length(cfg.L, cfg.mu, cfg.alpha)
    outcome.report = make_report(trace, cfg)
    extra = {"spec": spec.to_dict(), "L": cfg.L, "alpha": cfg.alpha, "mu": cfg.mu,
             "status": outcome.status, "message": outcome.message}
    if spec.out:
        write_trace(trace, spec.out, extra)
        outcome.files.append(spec.out)
    if spec.report and outcome.report is not None:
        Path(spec.report).parent.mkdir(parents=True, exist_ok=True)
        Path(spec.report).write_text(json.dumps(outcome.report.as_dict(), indent=2) + "\n")
        outcome.files.append(spec.report)
    if spec.plot:
        series = [(f"{cfg.method} gap", trace.ks.tolist(), _gaps(trace), False, 0)]
        if outcome.report is not None:
            rows = outcome.report.rows
            series.append((f"{cfg.method} bound", [r[0] for r in rows], [r[2] for r in rows], True, 0))
        _write(spec.plot, svg.log_chart(series, title=f"{cfg.method} on {spec.objective}"))
        outcome.files.append(spec.plot)
    return outcome


def _gaps(trace: Trace):
    g = trace.gaps
    return [None] * len(trace) if g is None else g.tolist()


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def run_spec_dict(d: dict[str, Any]) -> tuple[int, str]:
    """Process-pool entry point: returns (status, summary line)."""
    spec = RunSpec.from_dict(d)
    try:
        outcome = run(spec)
    except UsageError as err:
        return EXIT_USAGE, f"error: {err}"
    return outcome.status, summarize(spec, outcome)


def summarize(spec: RunSpec, outcome: RunOutcome) -> str:
    rec = outcome.trace.final
    parts = [f"{spec.solver.method} on {spec.objective}: k={rec.k} f={rec.f:.6g}"]
    if rec.gap is not None:
        parts.append(f"gap={rec.gap:.3e}")
    if outcome.report is not None:
        verdict = "VIOLATED" if outcome.report.violated else "holds"
        parts.append(f"bound {verdict} (max gap/bound {outcome.report.max_ratio:.3g})")
    if outcome.status:
        parts.append(f"ABORTED: {outcome.message}")
    return " ".join(parts)


def default_sampler(entry: ZooEntry, count: int = 10_000, seed: int = 0) -> conditions.Sampler:
    return conditions.box(entry.box[0], entry.box[1], count, seed)


def estimate(
    name: str,
    condition: str,
    sampler: conditions.Sampler | None = None,
    dim: int | None = None,
    kappa: float | None = None,
    seed: int = 0,
    report: str | None = None,
) -> conditions.ConditionEstimate:
    entry = _entry(name, dim, kappa, seed)
    sampler = sampler or default_sampler(entry)
    try:
        est = conditions.estimate(condition, entry.objective, sampler, entry.x_star)
    except ValueError as err:
        raise UsageError(f"{name}/{condition}: {err}") from err
    if report:
        body = {"objective": name, **est.as_dict(),
                "sampler": {"kind": sampler.kind, "count": sampler.count, "seed": sampler.seed,
                            "params": {k: v for k, v in sampler.params.items() if k != "trace"}}}
        _write(report, json.dumps(body, indent=2, default=float) + "\n")
    return est


def _bound_column(table, ks):
    m = table.meta
    gaps = table.gap
    R, L, alpha = m.get("R"), m.get("L"), m.get("alpha")
    if R is None or L is None or alpha is None or gaps[0] is None:
        return None
    method = m.get("method")
    try:
        rep = bound_report(method, table.k, gaps, L, R, alpha, m.get("mu"))
    except ValueError:
        return None
    by_k = {row[0]: row[2] for row in rep.rows}
    return [by_k.get(k) for k in ks]


def compare(paths, out: str | None = None, plot: str | None = None) -> list[list[str]]:
    """Align gap and bound columns of several traces on one objective."""
    if not paths:
        raise UsageError("compare needs at least one trace")
    try:
        tables = [read_trace(p) for p in paths]
    except TraceFormatError as err:
        raise UsageError(str(err)) from err
    names = {t.meta.get("objective") for t in tables}
    if len(names) > 1:
        raise UsageError(f"traces are for different objectives: {sorted(map(str, names))}")
    labels, seen = [], {}
    for t in tables:
        base = t.label
        seen[base] = seen.get(base, 0) + 1
        labels.append(base if seen[base] == 1 else f"{base}{seen[base]}")
    ks = sorted({k for t in tables for k in t.k})
    header = ["k"]
    columns = []
    series = []
    for group, (label, t) in enumerate(zip(labels, tables)):
        gap_by_k = dict(zip(t.k, t.gap))
        header.append(f"gap_{label}")
        columns.append([gap_by_k.get(k) for k in ks])
        series.append((f"{label} gap", t.k, t.gap, False, group))
        bounds = _bound_column(t, ks)
        if bounds is not None:
            header.append(f"bound_{label}")
            columns.append(bounds)
            series.append((f"{label} bound", ks, bounds, True, group))
    rows = [header] + [[str(k)] + [fmt(col[i]) for col in columns] for i, k in enumerate(ks)]
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    if plot:
        title = f"{', '.join(labels)} on {names.pop() or 'objective'}"
        _write(plot, svg.log_chart(series, title=title))
    return rows
