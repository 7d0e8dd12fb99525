from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from wqcopt.core import EvaluationError, Objective
from wqcopt.functions import abs_one_minus_exp, quadratic, random_quadratic, sphere_quartic
from wqcopt.subspace import AffineSubspace, minimize, reduce

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_reduce_collinear():
    sub = reduce(np.zeros(2), [np.array([1.0, 0.0]), np.array([2.0, 0.0])])
    assert sub.m == 1
    assert np.allclose(sub.directions[0], [1.0, 0.0])


def test_reduce_zero_vector():
    assert reduce(np.zeros(2), [np.zeros(2)]).m == 0


def test_reduce_gram_schmidt_plane():
    sub = reduce(np.zeros(2), [np.array([1.0, 0.0]), np.array([1.0, 1.0])])
    assert sub.m == 2
    assert np.allclose(sub.directions @ sub.directions.T, np.eye(2), atol=1e-12)


def test_reduce_rejects_bad_input():
    with pytest.raises(ValueError):
        reduce(np.zeros(2), [])
    with pytest.raises(ValueError):
        reduce(np.zeros(2), [np.ones(2)] * 4)
    with pytest.raises(ValueError):
        reduce(np.zeros(2), [np.array([np.inf, 0.0])])


@given(arrays(float, (3, 5), elements=finite))
def test_reduce_is_orthonormal_and_spans_inputs(raw):
    sub = reduce(np.zeros(5), list(raw))
    D = sub.directions
    assert np.allclose(D @ D.T, np.eye(sub.m), atol=1e-10)
    for d in raw:
        resid = d - D.T @ (D @ d)
        assert np.linalg.norm(resid) <= 1e-9 * (np.linalg.norm(d) + 1)


def half_norm_sq(n):
    return quadratic(np.eye(n), np.zeros(n))


def test_minimize_coordinate_direction():
    res = minimize(half_norm_sq(2), reduce(np.array([1.0, 1.0]), [np.array([1.0, 0.0])]))
    assert res.tau == pytest.approx([-1.0])
    assert res.x == pytest.approx([0.0, 1.0])
    assert res.f == pytest.approx(0.5)


def exact_step():
    # oracle: reduced quadratic along d = grad at base, tau = -d'(A base) / d'Ad, in exact arithmetic
    A = [[1, 0], [0, 4]]
    base, d = [2, 1], [2, 4]
    Ab = [sum(Fraction(A[i][j]) * base[j] for j in range(2)) for i in range(2)]
    Ad = [sum(Fraction(A[i][j]) * d[j] for j in range(2)) for i in range(2)]
    return -sum(di * a for di, a in zip(d, Ab)) / sum(di * a for di, a in zip(d, Ad))


def test_minimize_gradient_direction_closed_form():
    tau = exact_step()
    assert tau == Fraction(-5, 17)
    d = np.array([2.0, 4.0])
    expected = np.array([2.0, 1.0]) + float(tau) * d
    q = quadratic(np.diag([1.0, 4.0]), np.zeros(2))
    res = minimize(q, reduce(np.array([2.0, 1.0]), [d]))
    assert res.x == pytest.approx(expected, rel=1e-14)
    # coefficients refer to the normalized direction
    assert res.tau[0] == pytest.approx(float(tau) * np.linalg.norm(d), rel=1e-14)
    # same answer from the generic Newton path
    generic = Objective(2, q.value, q.gradient)
    assert minimize(generic, reduce(np.array([2.0, 1.0]), [d])).x == pytest.approx(expected, rel=1e-9)


def test_minimize_degenerate_subspace():
    sub = reduce(np.array([1.0, 2.0]), [np.zeros(2)])
    res = minimize(half_norm_sq(2), sub)
    assert res.x == pytest.approx([1.0, 2.0])
    assert res.tau.size == 0 and res.iters == 0


def test_minimize_non_convex_slice_from_concave_region():
    f = abs_one_minus_exp()
    res = minimize(f, reduce(np.array([3.0]), [np.array([1.0])]), safeguard=np.array([2.5]))
    assert res.converged
    assert abs(res.x[0]) < 1e-10
    assert res.residual <= 1e-10


def test_minimize_reports_non_convergence():
    f = abs_one_minus_exp()
    res = minimize(f, reduce(np.array([3.0]), [np.array([1.0])]), tol=1e-10, max_inner=1)
    assert not res.converged
    assert res.iters == 1
    assert res.f < f.value(np.array([3.0]))


def test_minimize_raises_on_nan():
    bad = Objective(1, lambda x: float("nan") if x[0] < 0.5 else float(x[0] ** 2), lambda x: 2 * x)
    with pytest.raises(EvaluationError):
        minimize(bad, reduce(np.array([1.0]), [np.array([1.0])]))


def test_safeguard_outside_subspace_wins_when_better():
    f = half_norm_sq(2)
    sub = reduce(np.array([1.0, 1.0]), [np.array([1.0, 0.0])])
    res = minimize(f, sub, safeguard=np.array([0.0, 0.0]))
    assert res.fallback == "safeguard"
    assert res.f == 0.0


@given(
    arrays(float, (3,), elements=st.floats(-2, 2)),
    arrays(float, (2, 3), elements=st.floats(-2, 2)),
    st.floats(0.01, 1.0),
)
def test_minimize_quartic_certificates(base, raw, t):
    f = sphere_quartic(3)
    sub = reduce(base, list(raw))
    safeguard = base - t * f.gradient(base) / 60.0
    res = minimize(f, sub, safeguard=safeguard)
    assert res.f <= min(f.value(base), f.value(safeguard))
    if res.fallback is None and res.converged:
        g = f.gradient(res.x)
        for d in sub.directions:
            assert abs(g @ d) <= 1e-10 * max(1.0, np.linalg.norm(g))
        again = minimize(f, AffineSubspace(res.x, sub.directions))
        assert abs(again.f - res.f) <= 1e-12 * max(1.0, abs(res.f))
    assert np.allclose(res.x, sub.point(res.tau), rtol=1e-12, atol=1e-12) or res.fallback == "safeguard"


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_minimize_quadratic_matches_reduced_solve(seed, m):
    q = random_quadratic(8, 100.0, seed, shift=True)
    rng = np.random.default_rng(seed)
    base = rng.uniform(-3, 3, 8)
    sub = reduce(base, list(rng.standard_normal((m, 8))))
    res = minimize(q, sub)
    A, b = q.quadratic
    D = sub.directions.T
    tau = np.linalg.solve(D.T @ A @ D, -D.T @ (A @ base + b))
    expected = q.value(base + D @ tau)
    assert res.f == pytest.approx(expected, rel=1e-10, abs=1e-12)
    assert res.residual <= 1e-10 * max(1.0, np.linalg.norm(res.gradient))
    assert res.f <= q.value(base)


def test_rounding_tie_is_flagged():
    # at the floor of f's resolution the stationary point can lose to the safeguard by an ulp
    q = random_quadratic(4, 10.0, seed=0, shift=True)
    x_star = q.minimizer()
    sub = reduce(x_star + 1e-9, [np.ones(4)])
    res = minimize(q, sub, safeguard=x_star)
    assert res.f <= q.value(x_star)
    if res.fallback is not None:
        assert res.rounding_tie or res.converged
