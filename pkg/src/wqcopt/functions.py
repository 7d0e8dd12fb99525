"""Analytic test objectives with known gradients and constants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Objective, Vector


@dataclass
class ZooEntry:
    """An objective plus reference constants.

    ``run_L`` is a Lipschitz constant for the gradient that is valid on the sublevel
    set of ``x0``; it equals ``objective.lipschitz_L`` when a global one exists.
    ``box`` is the standard sampling region used to certify the constants.
    """

    objective: Objective
    name: str
    alpha_ref: float | None = None
    mu_qg_ref: float | None = None
    notes: str = ""
    x0: Vector = field(default_factory=lambda: np.zeros(1))
    run_L: float | None = None
    box: tuple[float, float] = (-5.0, 5.0)

    @property
    def x_star(self) -> Vector | None:
        return self.objective.minimizer()


def quadratic(A, b, name: str = "quad") -> Objective:
    """f(x) = 1/2 <x, Ax> + <b, x> for symmetric positive semidefinite A."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).reshape(-1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise ValueError(f"incompatible shapes A{A.shape}, b{b.shape}")
    scale = max(np.abs(A).max(), 1e-300)
    if np.abs(A - A.T).max() > 1e-12 * max(1.0, scale):
        raise ValueError("A is not symmetric")
    A = 0.5 * (A + A.T)
    eig = np.linalg.eigvalsh(A)
    norm = max(abs(eig[0]), abs(eig[-1]))
    if eig[0] < -1e-10 * norm:
        raise ValueError(f"A is indefinite (smallest eigenvalue {eig[0]:.3e})")

    def value(x):
        return float(0.5 * x @ (A @ x) + b @ x)

    def gradient(x):
        return A @ x + b

    f_star = projector = None
    if eig[0] > 1e-10 * norm:
        x_star = np.linalg.solve(A, -b)
        f_star = value(x_star)

        def projector(x):
            return x_star.copy()

    return Objective(
        dim=A.shape[0],
        value=value,
        gradient=gradient,
        lipschitz_L=float(eig[-1]) if eig[-1] > 0 else None,
        f_star=f_star,
        projector=projector,
        name=name,
        quadratic=(A, b),
    )


def random_spd(n: int, kappa: float, seed: int, L: float = 1.0) -> np.ndarray:
    """Seeded SPD matrix with spectrum in [L/kappa, L], both ends attained exactly.

    Interior eigenvalues are log-uniform; eigenvectors come from a Haar-random rotation.
    """
    if kappa < 1:
        raise ValueError(f"condition number must be >= 1, got {kappa}")
    rng = np.random.default_rng(seed)
    mu = L / kappa
    if n == 1:
        spectrum = np.array([L])
    else:
        inner = np.exp(rng.uniform(np.log(mu), np.log(L), size=n - 2))
        spectrum = np.sort(np.concatenate([[mu], inner, [L]]))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    A = (q * spectrum) @ q.T
    return 0.5 * (A + A.T)


def random_quadratic(
    n: int, kappa: float, seed: int, L: float = 1.0, shift: bool = False, name: str = "quad"
) -> Objective:
    A = random_spd(n, kappa, seed, L)
    if shift:
        x_star = np.random.default_rng(seed + 10_000).uniform(-2.0, 2.0, size=n)
        b = -A @ x_star
    else:
        b = np.zeros(n)
    return quadratic(A, b, name=name)


def abs_one_minus_exp() -> Objective:
    """f(x) = |x| (1 - exp(-|x|)) on R: non-convex but 1-weakly-quasi-convex."""

    def value(x):
        a = abs(float(x[0]))
        return a * -np.expm1(-a)

    def gradient(x):
        t = float(x[0])
        a = abs(t)
        # sign(0) = 0 gives the correct derivative at the minimizer
        return np.array([np.sign(t) * (-np.expm1(-a) + a * np.exp(-a))])

    return Objective(
        dim=1,
        value=value,
        gradient=gradient,
        lipschitz_L=2.0,  # sup |f''| = f''(0+) = 2, f''(x) = (2 - x) e^{-x}
        f_star=0.0,
        projector=lambda x: np.zeros(1),
        name="abs_one_minus_exp",
    )


def sphere_quartic(n: int = 2) -> Objective:
    """f(x) = (|x|^2 - 1)^2; its minimizers form the unit sphere.

    Not globally L-smooth, so ``lipschitz_L`` is left unset.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    e1 = np.zeros(n)
    e1[0] = 1.0

    def value(x):
        s = x @ x - 1.0
        return float(s * s)

    def gradient(x):
        return 4.0 * (x @ x - 1.0) * x

    def projector(x):
        r = np.linalg.norm(x)
        if r == 0.0:
            return e1.copy()
        return x / r

    return Objective(
        dim=n, value=value, gradient=gradient, f_star=0.0, projector=projector,
        name="sphere_quartic",
    )


def sphere_quartic_L(radius: float) -> float:
    """Gradient Lipschitz constant of sphere_quartic on the ball of the given radius."""
    return max(12.0 * radius**2 - 4.0, 4.0)


OBJECTIVE_NAMES = ("quad1d", "quad", "quad-ill", "quad-rot", "abs_one_minus_exp", "sphere_quartic")


def make_entry(
    name: str, dim: int | None = None, kappa: float | None = None, seed: int = 0
) -> ZooEntry:
    """Build a zoo entry by CLI name; ``dim``/``kappa``/``seed`` apply where meaningful."""
    if name == "quad1d":
        obj = quadratic([[2.0]], [0.0], name="quad1d")
        return ZooEntry(obj, "quad1d", alpha_ref=1.0, mu_qg_ref=2.0,
                        notes="f = x^2", x0=np.array([1.0]), run_L=2.0)
    if name in ("quad", "quad-ill", "quad-rot"):
        n = dim or 10
        default_kappa = {"quad": 10.0, "quad-ill": 1000.0, "quad-rot": 100.0}[name]
        k = kappa or default_kappa
        obj = random_quadratic(n, k, seed, shift=(name == "quad-rot"), name=name)
        x0 = np.random.default_rng(seed + 20_000).uniform(-3.0, 3.0, size=n)
        notes = f"n={n}, kappa={k:g}, seed={seed}" + (", shifted minimizer" if name == "quad-rot" else "")
        return ZooEntry(obj, name, alpha_ref=1.0, mu_qg_ref=obj.lipschitz_L / k,
                        notes=notes, x0=x0, run_L=obj.lipschitz_L)
    if name == "abs_one_minus_exp":
        obj = abs_one_minus_exp()
        return ZooEntry(obj, name, alpha_ref=1.0, notes="non-convex, 1-WQC, no quadratic growth",
                        x0=np.array([3.0]), run_L=2.0, box=(-10.0, 10.0))
    if name == "sphere_quartic":
        n = dim or 2
        obj = sphere_quartic(n)
        x0 = np.full(n, 1.5 / np.sqrt(n))
        return ZooEntry(obj, name, mu_qg_ref=2.0,
                        notes="non-convex, quadratic growth; run_L valid on |x| <= 1.5",
                        x0=x0, run_L=sphere_quartic_L(1.5), box=(-2.0, 2.0))
    raise KeyError(f"unknown objective {name!r}; valid names: {', '.join(OBJECTIVE_NAMES)}")


def zoo() -> list[ZooEntry]:
    return [make_entry(name) for name in OBJECTIVE_NAMES]
