"""Gradient descent, SESOP, Nemirovski's conjugate gradients and its restarted variant."""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .core import EvaluationError, Objective, Trace, Vector, evaluate, make_record
from .subspace import DEFAULT_MAX_INNER, DEFAULT_TOL, minimize, reduce

logger = logging.getLogger(__name__)

METHODS = ("gd", "sesop", "cg", "cg-restart")
CONTRACTION = 0.75


class SolverAbort(RuntimeError):
    """A run stopped early; ``trace`` holds the iterates produced so far."""

    def __init__(self, message: str, trace: Trace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SolverConfig:
    method: str
    L: float
    T: int | None = None
    alpha: float | None = None
    mu: float | None = None
    cycles: int | None = None
    inner_tol: float = DEFAULT_TOL
    inner_max: int = DEFAULT_MAX_INNER
    record_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; valid methods: {', '.join(METHODS)}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.T is not None and self.T < 1:
            raise ValueError(f"T must be a positive integer, got {self.T}")
        if self.T is None and self.method != "cg-restart":
            raise ValueError(f"method {self.method!r} needs an iteration count T")
        if self.alpha is not None and not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.mu is not None and not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.method == "cg-restart" and (self.alpha is None or self.mu is None):
            raise ValueError("cg-restart requires alpha and mu")
        if self.cycles is not None and self.cycles < 0:
            raise ValueError(f"cycles must be nonnegative, got {self.cycles}")
        if not self.inner_tol > 0 or self.inner_max < 1 or self.record_every < 1:
            raise ValueError("inner_tol, inner_max and record_every must be positive")

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=repr)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def cycle_length(L: float, mu: float, alpha: float) -> int:
    """ceil(4 / (3 alpha) * sqrt(L / mu)), guarded against rounding just above an integer."""
    v = 4.0 / (3.0 * alpha) * math.sqrt(L / mu)
    return max(1, math.ceil(v - 1e-12 * v))


@dataclass
class OmegaSequence:
    """Weights w_0 = 1, w_i = 1/2 + sqrt(1/4 + w_{i-1}^2).

    Values are kept in extended precision: storing w_k in binary64 perturbs
    w_k^2 - w_{k-1}^2 by about 2 eps w_k^2, which breaks the identity
    w_k^2 - w_{k-1}^2 = w_k at the 1e-12 level once k is in the millions.
    """

    values: np.ndarray

    @classmethod
    def generate(cls, n: int) -> OmegaSequence:
        out = np.empty(n, dtype=np.longdouble)
        if n == 0:
            return cls(out)
        quarter, half = np.longdouble(0.25), np.longdouble(0.5)
        w = np.longdouble(1)
        out[0] = w
        for i in range(1, n):
            w = half + np.sqrt(quarter + w * w)
            out[i] = w
        return cls(out)

    def __len__(self) -> int:
        return len(self.values)

    def as_float(self) -> np.ndarray:
        return self.values.astype(float)

    def identity_residuals(self) -> np.ndarray:
        """|w_k^2 - w_{k-1}^2 - w_k| / w_k for k >= 1."""
        w = self.values
        diff = (w[1:] - w[:-1]) * (w[1:] + w[:-1])
        return np.abs(diff - w[1:]) / w[1:]


def _should_record(k: int, T: int, every: int) -> bool:
    return k % every == 0 or k == T


def _slack(f: float) -> float:
    return 1e-9 * max(1.0, abs(f))


def _new_trace(obj: Objective, x0: Vector, cfg: SolverConfig, method: str) -> Trace:
    R = None
    if obj.projector is not None:
        R = float(np.linalg.norm(x0 - obj.projector(x0)))
    return Trace(objective_name=obj.name, method=method, config_digest=cfg.digest(), R=R)


def _check_progress(trace, k, f_from, f_to, gnorm, L, label):
    """Abort if f_to exceeds the descent-lemma bound f_from - |g|^2 / 2L."""
    bound = f_from - gnorm**2 / (2 * L)
    if f_to > bound + _slack(f_from):
        raise SolverAbort(
            f"descent inequality violated at k={k}: {label} = {f_to!r} > "
            f"f - |grad f|^2/(2L) = {bound!r}; L={L} is likely below the true Lipschitz constant",
            trace,
        )


def _evaluate_or_abort(obj, x, trace, k):
    try:
        return evaluate(obj, x)
    except EvaluationError as err:
        raise SolverAbort(f"non-finite iterate at k={k}: {err}", trace) from err


def gradient_descent(obj: Objective, x0: Vector, cfg: SolverConfig) -> Trace:
    """Fixed step 1/L gradient descent for ``cfg.T`` iterations."""
    x = np.array(x0, dtype=float)
    trace = _new_trace(obj, x, cfg, "gd")
    L, T = cfg.L, cfg.T
    f, g = _evaluate_or_abort(obj, x, trace, 0)
    trace.append(make_record(obj, 0, x, f, g))
    for k in range(T):
        x_new = x - g / L
        f_new, g_new = _evaluate_or_abort(obj, x_new, trace, k + 1)
        _check_progress(trace, k, f, f_new, float(np.linalg.norm(g)), L, "f(x_{k+1})")
        x, f, g = x_new, f_new, g_new
        if _should_record(k + 1, T, cfg.record_every):
            trace.append(make_record(obj, k + 1, x, f, g))
    return trace


def _normalized_inner(g: Vector, v: Vector) -> float:
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return 0.0
    return abs(float(g @ v)) / (max(1.0, float(np.linalg.norm(g))) * nv)


def sesop(obj: Objective, x0: Vector, cfg: SolverConfig) -> Trace:
    """Sequential subspace optimization over span{g_k, x_k - x_0, sum_i w_i g_i}."""
    x0 = np.array(x0, dtype=float)
    trace = _new_trace(obj, x0, cfg, "sesop")
    L, T = cfg.L, cfg.T
    omega = OmegaSequence.generate(T).as_float()
    x = x0.copy()
    f, g = _evaluate_or_abort(obj, x, trace, 0)
    trace.append(make_record(obj, 0, x, f, g, ortho=(0.0, 0.0)))
    weighted = np.zeros_like(x)
    worst_residual = 0.0
    for k in range(T):
        weighted += omega[k] * g
        sub = reduce(x, [g, x - x0, weighted])
        try:
            res = minimize(obj, sub, cfg.inner_tol, cfg.inner_max, safeguard=x - g / L)
        except EvaluationError as err:
            raise SolverAbort(f"inner solve failed at k={k}: {err}", trace) from err
        if res.rounding_tie:
            logger.debug("sesop: k=%d kept the fallback point on a rounding-level tie", k)
        elif not res.converged:
            logger.warning("sesop: inner solve at k=%d stopped with residual %.3e", k, res.residual)
        worst_residual = max(worst_residual, res.residual)
        _check_progress(trace, k, f, res.f, float(np.linalg.norm(g)), L, "f(x_{k+1})")
        x, f, g = res.x, res.f, res.gradient
        if _should_record(k + 1, T, cfg.record_every):
            ortho = (_normalized_inner(g, x - x0), _normalized_inner(g, weighted))
            trace.append(make_record(obj, k + 1, x, f, g, inner_iters=res.iters,
                                     inner_residual=res.residual, ortho=ortho))
    trace.meta["max_inner_residual"] = worst_residual
    return trace


def nemirovski_cg(obj: Objective, x0: Vector, cfg: SolverConfig, T: int | None = None) -> Trace:
    """Nemirovski's conjugate gradients: minimize over x_0 + Lin{x_k - x_0, q_k}, then a 1/L step.

    ``trace.meta`` accumulates both sides of |q_T|^2 = sum_k |grad f(x_hat_k)|^2.
    """
    x0 = np.array(x0, dtype=float)
    trace = _new_trace(obj, x0, cfg, "cg")
    L = cfg.L
    T = cfg.T if T is None else T
    x = x0.copy()
    f, g = _evaluate_or_abort(obj, x, trace, 0)
    trace.append(make_record(obj, 0, x, f, g))
    q = np.zeros_like(x)
    grad_hat_sq = 0.0
    for k in range(T):
        sub = reduce(x0, [x - x0, q])
        try:
            res = minimize(obj, sub, cfg.inner_tol, cfg.inner_max, safeguard=x)
        except EvaluationError as err:
            raise SolverAbort(f"inner solve failed at k={k}: {err}", trace) from err
        if res.rounding_tie:
            logger.debug("cg: k=%d kept the fallback point on a rounding-level tie", k)
        elif not res.converged:
            logger.warning("cg: inner solve at k=%d stopped with residual %.3e", k, res.residual)
        x_hat, f_hat, g_hat = res.x, res.f, res.gradient
        x_new = x_hat - g_hat / L
        f_new, g_new = _evaluate_or_abort(obj, x_new, trace, k + 1)
        gh_norm = float(np.linalg.norm(g_hat))
        _check_progress(trace, k, f_hat, f_new, gh_norm, L, "f(x_{k+1})")
        q = q + g_hat
        grad_hat_sq += gh_norm**2
        x, f, g = x_new, f_new, g_new
        if _should_record(k + 1, T, cfg.record_every):
            trace.append(make_record(obj, k + 1, x, f, g, inner_iters=res.iters,
                                     inner_residual=res.residual, x_hat=x_hat.copy(), f_hat=f_hat))
    trace.meta["q_norm_sq"] = float(q @ q)
    trace.meta["grad_hat_sq_sum"] = grad_hat_sq
    return trace


def planned_cycles(gap0: float, eps: float) -> int:
    """Cycles of 3/4 contraction needed to bring ``gap0`` down to ``eps``."""
    if gap0 <= eps:
        return 0
    v = math.log(gap0 / eps) / math.log(1 / CONTRACTION)
    return math.ceil(v - 1e-9 * max(1.0, v))


def restarted_cg(obj: Objective, x0: Vector, cfg: SolverConfig, eps: float) -> Trace:
    """Repeated fixed-length CG cycles, each started from the previous cycle's output.

    With f* known the number of cycles is the scheduled ceil(log_{4/3}(gap_0 / eps)),
    capped by ``cfg.cycles`` when given; otherwise exactly ``cfg.cycles`` cycles run.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    T = cfg.T or cycle_length(cfg.L, cfg.mu, cfg.alpha)
    x = np.array(x0, dtype=float)
    trace = _new_trace(obj, x, cfg, "cg-restart")
    f0, g0 = _evaluate_or_abort(obj, x, trace, 0)
    trace.append(make_record(obj, 0, x, f0, g0))

    if obj.f_star is not None:
        gap0 = f0 - obj.f_star
        n_cycles = planned_cycles(gap0, eps)
        if cfg.cycles is not None:
            n_cycles = min(n_cycles, cfg.cycles)
    elif cfg.cycles is not None:
        gap0 = None
        n_cycles = cfg.cycles
    else:
        raise ValueError("cg-restart needs either a known f* or an explicit cycle count")

    trace.meta.update(cycle_length=T, gap0=gap0, cycle_starts=[], cycles_completed=0,
                      q_norm_sq=[], grad_hat_sq_sum=[])
    inner_cfg = replace(cfg, method="cg", T=T, record_every=1)
    for c in range(n_cycles):
        offset = c * T
        try:
            part = nemirovski_cg(obj, x, inner_cfg)
        except SolverAbort as err:
            _merge(trace, err.trace, offset, cfg.record_every, None)
            raise SolverAbort(f"cycle {c}: {err}", trace) from err
        trace.meta["cycle_starts"].append(offset)
        trace.meta["q_norm_sq"].append(part.meta["q_norm_sq"])
        trace.meta["grad_hat_sq_sum"].append(part.meta["grad_hat_sq_sum"])
        last = n_cycles * T if c == n_cycles - 1 else None
        _merge(trace, part, offset, cfg.record_every, last)
        trace.meta["cycles_completed"] = c + 1
        x = part.final.x
    return trace


def _merge(trace: Trace, part: Trace, offset: int, every: int, last: int | None) -> None:
    for rec in part.records[1:]:
        k = rec.k + offset
        if k % every == 0 or k == last:
            rec.k = k
            trace.append(rec)


def run_solver(obj: Objective, x0: Vector, cfg: SolverConfig, eps: float | None = None) -> Trace:
    if cfg.method == "gd":
        return gradient_descent(obj, x0, cfg)
    if cfg.method == "sesop":
        return sesop(obj, x0, cfg)
    if cfg.method == "cg":
        return nemirovski_cg(obj, x0, cfg)
    if eps is None:
        raise ValueError("cg-restart needs a target accuracy eps")
    return restarted_cg(obj, x0, cfg, eps)


def theoretical_bound(
    method: str,
    k: int,
    L: float,
    R: float,
    alpha: float,
    mu: float | None = None,
    gap0: float | None = None,
) -> float:
    """Guaranteed upper bound on f(x_k) - f* after ``k`` iterations of ``method``.

    ``cg`` and ``cg-restart`` use gap0 * (3/4)^floor(k / T_cycle), which needs both
    ``mu`` and the initial gap ``gap0``.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if L <= 0 or R < 0 or k < 0:
        raise ValueError("need L > 0, R >= 0 and k >= 0")
    if method == "gd":
        return L * R**2 / (alpha * (k + 1))
    if method == "sesop":
        if k == 0:
            return math.inf
        return 2 * L * R**2 / (alpha**2 * k**2)
    if method in ("cg", "cg-restart"):
        if mu is None:
            raise ValueError(f"{method} bound needs mu")
        if gap0 is None:
            raise ValueError(f"{method} bound needs the initial gap gap0")
        return gap0 * CONTRACTION ** (k // cycle_length(L, mu, alpha))
    raise ValueError(f"unknown method {method!r}; valid methods: {', '.join(METHODS)}")
