"""First-order methods for smooth weakly-quasi-convex minimization and checks of their rate bounds."""

from .core import Objective, Trace, check_gradient, finite_diff_grad
from .functions import ZooEntry, abs_one_minus_exp, quadratic, sphere_quartic, zoo
from .solvers import (
    OmegaSequence,
    SolverAbort,
    SolverConfig,
    gradient_descent,
    nemirovski_cg,
    restarted_cg,
    sesop,
    theoretical_bound,
)

__all__ = [
    "Objective", "OmegaSequence", "SolverAbort", "SolverConfig", "Trace", "ZooEntry",
    "abs_one_minus_exp", "check_gradient", "finite_diff_grad", "gradient_descent",
    "nemirovski_cg", "quadratic", "restarted_cg", "sesop", "sphere_quartic",
    "theoretical_bound", "zoo",
]
