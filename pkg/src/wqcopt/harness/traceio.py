"""Trace CSV files, their JSON sidecars, and bound reports."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..core import Trace
from ..solvers import theoretical_bound

HEADER = ["k", "f", "gap", "grad_norm", "inner_iters", "inner_residual"]


class TraceFormatError(ValueError):
    pass


def fmt(v: float | None) -> str:
    """17 significant digits so every double round-trips."""
    if v is None:
        return ""
    return format(float(v), ".17g")


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_trace(trace: Trace, path: str | Path, extra_meta: dict[str, Any] | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for r in trace.records:
            w.writerow([r.k, fmt(r.f), fmt(r.gap), fmt(r.grad_norm), r.inner_iters, fmt(r.inner_residual)])
    meta = {
        "objective": trace.objective_name,
        "method": trace.method,
        "config_digest": trace.config_digest,
        "R": trace.R,
        "meta": _jsonable(trace.meta),
    }
    meta.update(extra_meta or {})
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return obj


@dataclass
class TraceTable:
    """A trace read back from disk: columns plus sidecar metadata (empty if missing)."""

    path: Path
    k: list[int]
    f: list[float]
    gap: list[float | None]
    grad_norm: list[float]
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.meta.get("method") or self.path.stem


def read_trace(path: str | Path) -> TraceTable:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise TraceFormatError(f"cannot read trace {path}: {err}") from err
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise TraceFormatError(f"{path}: empty trace file")
    if rows[0] != HEADER:
        raise TraceFormatError(f"{path}: expected header {','.join(HEADER)}, got {','.join(rows[0])}")
    if len(rows) == 1:
        raise TraceFormatError(f"{path}: trace has no records")
    table = TraceTable(path, [], [], [], [])
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(HEADER):
            raise TraceFormatError(f"{path}:{i}: expected {len(HEADER)} fields, got {len(row)}")
        try:
            table.k.append(int(row[0]))
            table.f.append(float(row[1]))
            table.gap.append(float(row[2]) if row[2] else None)
            table.grad_norm.append(float(row[3]))
        except ValueError as err:
            raise TraceFormatError(f"{path}:{i}: {err}") from err
    side = sidecar_path(path)
    if side.exists():
        table.meta = json.loads(side.read_text())
    return table


@dataclass
class BoundReport:
    method: str
    rows: list[tuple[int, float, float, float]]  # (k, gap, bound, gap/bound)
    max_ratio: float
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return bool(self.max_ratio > 1 + 1e-9)

    def as_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "params": self.params,
            "max_ratio": self.max_ratio,
            "violated": bool(self.violated),
            "rows": [{"k": k, "gap": g, "bound": b, "ratio": r} for k, g, b, r in self.rows],
        }


def bound_report(
    method: str, ks, gaps, L: float, R: float, alpha: float, mu: float | None = None
) -> BoundReport:
    """Compare recorded gaps with the guaranteed bound at every recorded iteration."""
    gap0 = gaps[0]
    rows, worst = [], 0.0
    for k, gap in zip(ks, gaps):
        if gap is None:
            continue
        if method == "sesop" and k == 0:
            continue
        b = theoretical_bound(method, k, L, R, alpha, mu=mu, gap0=gap0)
        ratio = gap / b if b > 0 else (0.0 if gap <= 0 else math.inf)
        rows.append((int(k), float(gap), float(b), float(ratio)))
        worst = max(worst, float(ratio))
    params = {"L": L, "R": R, "alpha": alpha, "mu": mu, "gap0": None if gap0 is None else float(gap0)}
    return BoundReport(method, rows, worst, params)
