"""Sampled estimators for weak quasi-convexity, quadratic growth, PL, weak PL and star-convexity.

Every estimate is an infimum over a finite sample, so it is an optimistic value for the
true constant: "holds on samples", never a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import Objective, Trace, Vector

CONDITIONS = ("wqc", "qg", "pl", "weak-pl", "star")
SAMPLER_KINDS = ("box-uniform", "gaussian-around", "trajectory")
GAP_FLOOR = 1e-12
STAR_TOL = 1e-9
LAMBDA_GRID = np.linspace(0.0, 1.0, 101)


@dataclass
class Sampler:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    count: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}; valid kinds: {', '.join(SAMPLER_KINDS)}")
        if self.count < 1:
            raise ValueError(f"count must be positive, got {self.count}")

    def points(self, dim: int) -> np.ndarray:
        """(count, dim) array; rows are drawn in order, so a larger count extends a smaller one."""
        rng = np.random.default_rng(self.seed)
        if self.kind == "box-uniform":
            low = np.broadcast_to(np.asarray(self.params.get("low", -1.0), dtype=float), (dim,))
            high = np.broadcast_to(np.asarray(self.params.get("high", 1.0), dtype=float), (dim,))
            return low + (high - low) * rng.random((self.count, dim))
        if self.kind == "gaussian-around":
            center = np.broadcast_to(np.asarray(self.params.get("center", 0.0), dtype=float), (dim,))
            scale = float(self.params.get("scale", 1.0))
            return center + scale * rng.standard_normal((self.count, dim))
        trace: Trace = self.params["trace"]
        return np.array([r.x for r in trace.records[: self.count]], dtype=float).reshape(-1, dim)


def box(low, high, count: int = 10_000, seed: int = 0) -> Sampler:
    return Sampler("box-uniform", {"low": low, "high": high}, count, seed)


def gaussian(center, scale: float, count: int = 10_000, seed: int = 0) -> Sampler:
    return Sampler("gaussian-around", {"center": center, "scale": scale}, count, seed)


def trajectory(trace: Trace, count: int | None = None) -> Sampler:
    return Sampler("trajectory", {"trace": trace}, count or len(trace.records), 0)


@dataclass
class ConditionEstimate:
    condition: str
    raw_inf: float
    constant: float
    witness: Vector
    samples: int
    seed: int
    skipped: int = 0

    @property
    def holds(self) -> bool:
        if self.condition == "star":
            return self.raw_inf >= -STAR_TOL
        return self.constant > 0

    def as_dict(self) -> dict[str, Any]:
        return {
            "condition": self.condition,
            "raw_inf": self.raw_inf,
            "constant": self.constant,
            "witness": [float(v) for v in self.witness],
            "samples": self.samples,
            "seed": self.seed,
            "skipped": self.skipped,
            "verdict": "holds on samples" if self.holds else "fails with witness",
        }


def _f_star(obj: Objective, x_star: Vector | None = None) -> float:
    if obj.f_star is not None:
        return obj.f_star
    if x_star is not None:
        return float(obj.value(x_star))
    raise ValueError(f"{obj.name or 'objective'}: f* is unknown and no minimizer was given")


def _infimum(condition, ratios, points, sampler, clamp, skipped) -> ConditionEstimate:
    if not ratios:
        raise ValueError(f"{condition}: no admissible samples (every sample lies on the solution set)")
    ratios = np.asarray(ratios)
    i = int(np.argmin(ratios))  # first minimizer: deterministic tie-breaking
    raw = float(ratios[i])
    return ConditionEstimate(condition, raw, clamp(raw), np.array(points[i]), sampler.count,
                             sampler.seed, skipped)


def _ratios(obj, sampler, fn, f_star, gap_floor=GAP_FLOOR):
    pts, ratios, kept = sampler.points(obj.dim), [], []
    for x in pts:
        gap = float(obj.value(x)) - f_star
        if gap <= gap_floor:
            continue
        ratios.append(fn(x, gap))
        kept.append(x)
    return ratios, kept, len(pts) - len(kept)


def wqc_ratios(obj: Objective, x_star: Vector, s: Sampler):
    """Per-sample <grad f(x), x - x*> / (f(x) - f*), with the admissible points."""
    f_star = _f_star(obj, x_star)
    return _ratios(obj, s, lambda x, gap: float(obj.gradient(x) @ (x - x_star)) / gap, f_star)


def weak_pl_ratios(obj: Objective, x_star: Vector, s: Sampler):
    f_star = _f_star(obj, x_star)

    def ratio(x, gap):
        return (float(np.linalg.norm(obj.gradient(x))) * float(np.linalg.norm(x - x_star)) / gap) ** 2

    return _ratios(obj, s, ratio, f_star)


def estimate_wqc_alpha(obj: Objective, x_star: Vector, s: Sampler) -> ConditionEstimate:
    x_star = np.asarray(x_star, dtype=float)
    ratios, pts, skipped = wqc_ratios(obj, x_star, s)
    return _infimum("wqc", ratios, pts, s, lambda r: min(max(r, 0.0), 1.0), skipped)


def estimate_qg_mu(obj: Objective, s: Sampler) -> ConditionEstimate:
    if obj.projector is None:
        raise ValueError(f"{obj.name or 'objective'}: quadratic growth needs the projection onto the solution set")
    f_star = _f_star(obj)

    pts, ratios, kept = s.points(obj.dim), [], []
    for x in pts:
        d2 = float(np.sum((x - obj.projector(x)) ** 2))
        if d2 == 0.0:
            continue
        gap = float(obj.value(x)) - f_star
        if gap <= GAP_FLOOR:
            continue
        ratios.append(2.0 * gap / d2)
        kept.append(x)
    return _infimum("qg", ratios, kept, s, lambda r: max(r, 0.0), len(pts) - len(kept))


def estimate_pl_mu(obj: Objective, s: Sampler) -> ConditionEstimate:
    f_star = _f_star(obj)
    ratios, pts, skipped = _ratios(
        obj, s, lambda x, gap: float(np.sum(obj.gradient(x) ** 2)) / (2.0 * gap), f_star)
    return _infimum("pl", ratios, pts, s, lambda r: max(r, 0.0), skipped)


def estimate_weak_pl_mu(obj: Objective, x_star: Vector, s: Sampler) -> ConditionEstimate:
    x_star = np.asarray(x_star, dtype=float)
    ratios, pts, skipped = weak_pl_ratios(obj, x_star, s)
    return _infimum("weak-pl", ratios, pts, s, lambda r: max(r, 0.0), skipped)


@dataclass
class StarViolation:
    violation: float
    witness: Vector
    lam: float


def check_star_convexity(
    obj: Objective, x_star: Vector, s: Sampler, lambdas=LAMBDA_GRID
) -> StarViolation:
    """Largest f(l x* + (1-l) x) - l f(x*) - (1-l) f(x) over samples and the l grid."""
    x_star = np.asarray(x_star, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any((lambdas < 0) | (lambdas > 1)):
        raise ValueError("lambdas must lie in [0, 1]")
    f_xs = float(obj.value(x_star))
    best = StarViolation(-np.inf, x_star.copy(), 0.0)
    for x in s.points(obj.dim):
        fx = float(obj.value(x))
        for lam in lambdas:
            v = float(obj.value(lam * x_star + (1 - lam) * x)) - lam * f_xs - (1 - lam) * fx
            if v > best.violation:
                best = StarViolation(v, x.copy(), float(lam))
    return best


@dataclass
class CrosscheckReport:
    wqc_holds: bool
    star_holds: bool
    wqc: ConditionEstimate
    star: StarViolation

    @property
    def agree(self) -> bool:
        return self.wqc_holds == self.star_holds

    def summary(self) -> str:
        def word(ok):
            return "holds on samples" if ok else "fails with witness"

        return (f"1-WQC {word(self.wqc_holds)} (inf ratio {self.wqc.raw_inf:.6g}); "
                f"star-convexity {word(self.star_holds)} (max violation {self.star.violation:.3g}); "
                f"{'agree' if self.agree else 'DISAGREE'}")


def lemma1_crosscheck(
    obj: Objective, x_star: Vector, s: Sampler, ratio_tol: float = 1e-6, violation_tol: float = STAR_TOL
) -> CrosscheckReport:
    """Run the 1-WQC and star-convexity tests on one sample set and compare verdicts."""
    wqc = estimate_wqc_alpha(obj, x_star, s)
    star = check_star_convexity(obj, x_star, s)
    return CrosscheckReport(wqc.raw_inf >= 1.0 - ratio_tol, star.violation <= violation_tol, wqc, star)


def estimate_lipschitz(obj: Objective, s: Sampler, power_iters: int = 30, h: float = 1e-4) -> float:
    """Lower estimate of the gradient Lipschitz constant.

    At each sample, power iteration on gradient differences approximates the top
    curvature; the reported value is the largest |grad f(x+v) - grad f(x)| / |v| seen.
    """
    rng = np.random.default_rng(s.seed + 1)
    best = 0.0
    for x in s.points(obj.dim):
        g0 = obj.gradient(x)
        v = rng.standard_normal(obj.dim)
        for _ in range(power_iters):
            v *= h / np.linalg.norm(v)
            dg = obj.gradient(x + v) - g0
            best = max(best, float(np.linalg.norm(dg)) / h)
            if not np.any(dg):
                break
            v = dg
    return best


def estimate(condition: str, obj: Objective, s: Sampler, x_star: Vector | None = None) -> ConditionEstimate:
    """Dispatch by condition name.

    For ``star`` the infimum is taken over the convexity margin
    l f(x*) + (1-l) f(x) - f(l x* + (1-l) x), which is never positive.
    """
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}; valid conditions: {', '.join(CONDITIONS)}")
    if condition in ("wqc", "weak-pl", "star") and x_star is None:
        x_star = obj.minimizer()
        if x_star is None:
            raise ValueError(f"{condition} needs a minimizer x* and none is known for {obj.name!r}")
    if condition == "wqc":
        return estimate_wqc_alpha(obj, x_star, s)
    if condition == "qg":
        return estimate_qg_mu(obj, s)
    if condition == "pl":
        return estimate_pl_mu(obj, s)
    if condition == "weak-pl":
        return estimate_weak_pl_mu(obj, x_star, s)
    star = check_star_convexity(obj, x_star, s)
    return ConditionEstimate("star", -star.violation, -star.violation, star.witness,
                             s.count, s.seed)
