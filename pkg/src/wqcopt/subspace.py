"""Minimization of an objective over a low-dimensional affine subspace."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EvaluationError, Objective, Vector, evaluate

DROP_THRESHOLD = 1e-12
DEFAULT_TOL = 1e-10
DEFAULT_MAX_INNER = 200


@dataclass
class AffineSubspace:
    """``base + span(directions)`` with orthonormal rows in ``directions`` (shape m x n)."""

    base: Vector
    directions: np.ndarray

    @property
    def m(self) -> int:
        return self.directions.shape[0]

    def point(self, tau: Vector) -> Vector:
        if self.m == 0:
            return self.base.copy()
        return self.base + tau @ self.directions

    def coordinates(self, x: Vector) -> tuple[Vector, float]:
        """Coordinates of the projection of ``x`` and the distance from ``x`` to the subspace."""
        tau = self.directions @ (x - self.base)
        return tau, float(np.linalg.norm(self.point(tau) - x))


@dataclass
class SubspaceResult:
    tau: Vector
    x: Vector
    f: float
    residual: float
    iters: int
    converged: bool = True
    gradient: Vector | None = None
    # set when the returned point is the safeguard/base candidate rather than the solver iterate
    fallback: str | None = None
    # the solver iterate was stationary and lost to the fallback only by rounding in f
    rounding_tie: bool = False


def reduce(base: Vector, raw_directions) -> AffineSubspace:
    """Orthonormalize up to three directions, dropping numerically dependent ones."""
    raw = [np.asarray(d, dtype=float) for d in raw_directions]
    if not 1 <= len(raw) <= 3:
        raise ValueError(f"expected 1 to 3 directions, got {len(raw)}")
    base = np.array(base, dtype=float)
    kept: list[Vector] = []
    for d in raw:
        if d.shape != base.shape:
            raise ValueError(f"direction shape {d.shape} does not match base {base.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError(f"non-finite direction {d!r}")
        norm0 = float(np.linalg.norm(d))
        if norm0 == 0.0:
            continue
        v = d.copy()
        for _ in range(2):  # twice is enough (Kahan-Parlett)
            for u in kept:
                v -= (u @ v) * u
        nv = float(np.linalg.norm(v))
        if nv <= DROP_THRESHOLD * (norm0 + 1.0):
            continue
        kept.append(v / nv)
    directions = np.array(kept) if kept else np.zeros((0, base.shape[0]))
    return AffineSubspace(base, directions)


def _residual(sub: AffineSubspace, g: Vector) -> float:
    if sub.m == 0:
        return 0.0
    return float(np.linalg.norm(sub.directions @ g))


def _is_converged(residual: float, g: Vector, tol: float) -> bool:
    return residual <= tol * max(1.0, float(np.linalg.norm(g)))


def _reduced_hessian(obj: Objective, sub: AffineSubspace, x: Vector) -> np.ndarray:
    h = 1e-5 * max(1.0, float(np.linalg.norm(x)))
    D = sub.directions
    H = np.empty((sub.m, sub.m))
    for j in range(sub.m):
        gp = np.asarray(obj.gradient(x + h * D[j]), dtype=float)
        gm = np.asarray(obj.gradient(x - h * D[j]), dtype=float)
        H[:, j] = D @ (gp - gm) / (2 * h)
    return 0.5 * (H + H.T)


def _line_search(obj, sub, tau, f, slope, p, max_halvings=60):
    """Armijo backtracking along ``p``; returns the accepted (tau, f) or None."""
    t = 1.0
    for _ in range(max_halvings):
        trial = tau + t * p
        ft = float(obj.value(sub.point(trial)))
        if not np.isfinite(ft):
            raise EvaluationError(f"non-finite objective during subspace search at tau={trial!r}",
                                  sub.point(trial))
        if ft <= f + 1e-4 * t * slope:
            return trial, ft
        t *= 0.5
    return None


def _solve_quadratic(obj: Objective, sub: AffineSubspace) -> Vector:
    A, b = obj.quadratic
    D = sub.directions
    H = D @ A @ D.T
    rhs = -D @ (A @ sub.base + b)
    tau, *_ = np.linalg.lstsq(H, rhs, rcond=None)
    return tau


def _newton(obj, sub, tau, tol, max_inner):
    """Damped Newton in reduced coordinates with gradient-step fallback."""
    x = sub.point(tau)
    f, g = evaluate(obj, x)
    iters = 0
    while iters < max_inner:
        gr = sub.directions @ g
        if _is_converged(float(np.linalg.norm(gr)), g, tol):
            return tau, True, iters
        H = _reduced_hessian(obj, sub, x)
        w, V = np.linalg.eigh(H)
        curv = max(float(np.abs(w).max()), 1e-300)
        # absolute-value eigenvalues keep the Newton direction a descent direction on
        # non-convex slices
        w_mod = np.maximum(np.abs(w), 1e-8 * curv)
        p = -V @ ((V.T @ gr) / w_mod)
        cap = 1e3 * max(1.0, float(np.linalg.norm(x)))
        pn = float(np.linalg.norm(p))
        if pn > cap:
            p *= cap / pn
        step = None
        if -0.5 * float(gr @ p) <= 8 * np.finfo(float).eps * max(1.0, abs(f)):
            # decrease below the resolution of f: judge the full step by the gradient instead
            trial = tau + p
            f_t, g_t = evaluate(obj, sub.point(trial))
            if f_t <= f + 8 * np.finfo(float).eps * max(1.0, abs(f)) and \
                    np.linalg.norm(sub.directions @ g_t) < np.linalg.norm(gr):
                step = (trial, f_t)
        if step is None:
            step = _line_search(obj, sub, tau, f, float(gr @ p), p)
        if step is None:
            p = -gr / curv
            step = _line_search(obj, sub, tau, f, float(gr @ p), p)
        iters += 1
        if step is None:
            break  # no decrease representable: stalled at rounding level
        tau = step[0]
        x = sub.point(tau)
        f, g = evaluate(obj, x)
    gr = sub.directions @ g
    return tau, _is_converged(float(np.linalg.norm(gr)), g, tol), iters


def minimize(
    obj: Objective,
    sub: AffineSubspace,
    tol: float = DEFAULT_TOL,
    max_inner: int = DEFAULT_MAX_INNER,
    safeguard: Vector | None = None,
) -> SubspaceResult:
    """Find a stationary point of f restricted to ``sub``.

    The result never has a larger objective value than ``sub.base`` or ``safeguard``.
    Quadratic objectives are solved in closed form. For general objectives the
    returned point satisfies the residual test but need not be the global minimizer
    of the (possibly non-convex) restriction. A result that ran out of ``max_inner``
    iterations comes back with ``converged=False``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    f_base, g_base = evaluate(obj, sub.base)
    candidates = [("base", np.zeros(sub.m), sub.base, f_base, g_base)]
    if safeguard is not None:
        safeguard = np.asarray(safeguard, dtype=float)
        f_sg, g_sg = evaluate(obj, safeguard)
        tau_sg, dist = sub.coordinates(safeguard)
        candidates.append(("safeguard", tau_sg, safeguard, f_sg, g_sg))
        in_subspace = dist <= 1e-10 * (1.0 + float(np.linalg.norm(safeguard - sub.base)))
    else:
        in_subspace = False

    if sub.m == 0:
        tau, iters, converged = np.zeros(0), 0, True
    elif obj.quadratic is not None:
        tau, iters, converged = _solve_quadratic(obj, sub), 1, True
    else:
        start = np.zeros(sub.m)
        if in_subspace and candidates[1][3] < f_base:
            start = candidates[1][1]
        tau, converged, iters = _newton(obj, sub, start, tol, max_inner)

    x = sub.point(tau)
    f, g = evaluate(obj, x)
    solver_ok = _is_converged(_residual(sub, g), g, tol)
    f_solver = f
    fallback = None
    for label, c_tau, c_x, c_f, c_g in candidates:
        if c_f < f:
            tau, x, f, g, fallback = c_tau, c_x.copy(), c_f, c_g, label
    residual = _residual(sub, g)
    if obj.quadratic is not None or fallback is not None:
        converged = _is_converged(residual, g, tol)
    tie = (fallback is not None and solver_ok
           and f_solver - f <= 8 * np.finfo(float).eps * max(1.0, abs(f)))
    return SubspaceResult(tau=tau, x=x, f=f, residual=residual, iters=iters,
                          converged=converged, gradient=g, fallback=fallback, rounding_tie=tie)
