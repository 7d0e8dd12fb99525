"""Objective abstraction, iterate traces and the finite-difference gradient oracle."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

Vector = npt.NDArray[np.float64]


class EvaluationError(ValueError):
    """An objective oracle returned a non-finite value."""

    def __init__(self, message: str, point: Vector | None = None):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class Objective:
    """A differentiable function on R^n together with whatever constants are known about it.

    ``quadratic`` optionally carries ``(A, b)`` for f(x) = 1/2 x'Ax + b'x so that
    subspace minimization can use the closed-form reduced solve.
    """

    dim: int
    value: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    lipschitz_L: float | None = None
    f_star: float | None = None
    projector: Callable[[Vector], Vector] | None = None
    name: str = ""
    quadratic: tuple[npt.NDArray[np.float64], Vector] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.lipschitz_L is not None and not self.lipschitz_L > 0:
            raise ValueError(f"lipschitz_L must be positive, got {self.lipschitz_L}")

    def __call__(self, x: Vector) -> float:
        return self.value(x)

    def minimizer(self, x: Vector | None = None) -> Vector | None:
        """Nearest global minimizer to ``x`` (origin by default), if a projector is known."""
        if self.projector is None:
            return None
        if x is None:
            x = np.zeros(self.dim)
        return self.projector(np.asarray(x, dtype=float))


@dataclass
class IterateRecord:
    k: int
    x: Vector
    f: float
    grad_norm: float
    gap: float | None = None
    inner_iters: int = 0
    inner_residual: float = 0.0
    # CG only: the subspace minimizer x_hat_{k-1} that produced this iterate
    x_hat: Vector | None = None
    f_hat: float | None = None
    # SESOP only: normalized |<g_k, x_k - x_0>| and |<g_k, weighted gradient sum>|
    ortho: tuple[float, float] | None = None


@dataclass
class Trace:
    records: list[IterateRecord] = field(default_factory=list)
    objective_name: str = ""
    method: str = ""
    config_digest: str = ""
    R: float | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def append(self, record: IterateRecord) -> None:
        if self.records and record.k <= self.records[-1].k:
            raise ValueError(
                f"iteration index must increase: got {record.k} after {self.records[-1].k}"
            )
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.k for r in self.records], dtype=int)

    @property
    def fs(self) -> np.ndarray:
        return np.array([r.f for r in self.records])

    @property
    def gaps(self) -> np.ndarray | None:
        if not self.records or self.records[0].gap is None:
            return None
        return np.array([r.gap for r in self.records])

    @property
    def final(self) -> IterateRecord:
        return self.records[-1]


def make_record(obj: Objective, k: int, x: Vector, f: float, g: Vector, **extra) -> IterateRecord:
    gap = None if obj.f_star is None else f - obj.f_star
    return IterateRecord(
        k=k, x=np.array(x, dtype=float), f=float(f), grad_norm=float(np.linalg.norm(g)),
        gap=gap, **extra,
    )


def evaluate(obj: Objective, x: Vector) -> tuple[float, Vector]:
    """Value and gradient at ``x``; raises EvaluationError on non-finite output."""
    f = float(obj.value(x))
    g = np.asarray(obj.gradient(x), dtype=float)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise EvaluationError(f"non-finite objective or gradient at x={x!r}", x)
    return f, g


def finite_diff_grad(obj: Objective, x: Vector, h: float = 1e-5) -> Vector:
    """Central-difference gradient, one coordinate at a time."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"x must be finite, got {x!r}")
    out = np.empty(x.shape[0])
    probe = x.copy()
    for i in range(x.shape[0]):
        probe[i] = x[i] + h
        fp = float(obj.value(probe))
        if not np.isfinite(fp):
            raise EvaluationError(f"non-finite value at probe point {probe!r}", probe.copy())
        probe[i] = x[i] - h
        fm = float(obj.value(probe))
        if not np.isfinite(fm):
            raise EvaluationError(f"non-finite value at probe point {probe!r}", probe.copy())
        probe[i] = x[i]
        out[i] = (fp - fm) / (2 * h)
    return out


def check_gradient(
    obj: Objective, x: Vector, h: float = 1e-5, rtol: float = 1e-6
) -> tuple[bool, float]:
    """Compare the analytic gradient against central differences.

    Returns ``(ok, err)`` with ``err = |g - g_fd| / max(1, |g|)``.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(obj.gradient(x), dtype=float)
    if g.shape != (obj.dim,):
        raise ValueError(f"gradient has shape {g.shape}, expected ({obj.dim},)")
    fd = finite_diff_grad(obj, x, h)
    err = float(np.linalg.norm(g - fd) / max(1.0, np.linalg.norm(g)))
    return err <= rtol, err
