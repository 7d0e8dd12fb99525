import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wqcopt.conditions import (
    Sampler,
    box,
    check_star_convexity,
    estimate,
    estimate_lipschitz,
    estimate_pl_mu,
    estimate_qg_mu,
    estimate_wqc_alpha,
    estimate_weak_pl_mu,
    gaussian,
    lemma1_crosscheck,
    trajectory,
    wqc_ratios,
)
from wqcopt.core import Objective
from wqcopt.functions import abs_one_minus_exp, make_entry, quadratic, random_quadratic, sphere_quartic, zoo
from wqcopt.solvers import SolverConfig, gradient_descent


def square():
    # f = x^2: L = 2
    return quadratic([[2.0]], [0.0])


def test_sampler_validation_and_prefix():
    with pytest.raises(ValueError):
        Sampler("sobol")
    with pytest.raises(ValueError):
        box(-1, 1, count=0)
    small, large = box(-1, 1, 100, seed=3).points(4), box(-1, 1, 1000, seed=3).points(4)
    assert np.array_equal(small, large[:100])
    pts = box(-2, 5, 500).points(3)
    assert pts.min() >= -2 and pts.max() <= 5


def test_wqc_on_square_is_two_clamped_to_one():
    est = estimate_wqc_alpha(square(), np.zeros(1), box(-3, 3, 1000))
    assert est.raw_inf == pytest.approx(2.0, rel=1e-12)
    assert est.constant == 1.0
    assert est.holds


def test_weak_pl_on_square():
    est = estimate_weak_pl_mu(square(), np.zeros(1), box(-3, 3, 1000))
    assert est.constant == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("L", [0.5, 2.0, 3.0])
def test_pl_and_qg_on_scalar_quadratic_equal_curvature(L):
    q = quadratic([[L]], [0.0])
    assert estimate_pl_mu(q, box(-3, 3, 500)).constant == pytest.approx(L, rel=1e-12)
    assert estimate_qg_mu(q, box(-3, 3, 500)).constant == pytest.approx(L, rel=1e-12)


def test_qg_pl_on_pd_quadratic_trajectory():
    # along a gradient descent path the iterates align with the smallest eigenvector
    q = random_quadratic(10, 10.0, seed=2)
    tr = gradient_descent(q, np.random.default_rng(0).standard_normal(10), SolverConfig("gd", q.lipschitz_L, 400))
    s = trajectory(tr)
    lam_min = 0.1
    qg = estimate_qg_mu(q, s).constant
    pl = estimate_pl_mu(q, s).constant
    assert lam_min * (1 - 1e-9) <= qg <= lam_min * 1.02
    assert lam_min * (1 - 1e-9) <= pl <= lam_min * 1.02


def test_sphere_quartic_fails_wqc_and_pl_near_origin():
    f = sphere_quartic(2)
    near = gaussian(0.0, 1e-3, 2000, seed=1)
    wqc = estimate_wqc_alpha(f, np.array([1.0, 0.0]), near)
    assert wqc.constant == 0.0 and not wqc.holds
    assert np.linalg.norm(wqc.witness) < 0.01
    pl = estimate_pl_mu(f, near)
    assert pl.constant < 1e-3


def test_sphere_quartic_qg():
    est = estimate_qg_mu(sphere_quartic(2), gaussian(0.0, 0.25, 10_000, seed=0))
    assert est.constant == pytest.approx(2.0, rel=0.05)
    assert est.constant >= 2.0 * (1 - 1e-9)


def test_star_violation_on_sphere_quartic():
    f = sphere_quartic(2)
    x_star = np.array([1.0, 0.0])
    only = Sampler("trajectory", {"trace": _points_trace([[-1.0, 0.0]])}, 1)
    v = check_star_convexity(f, x_star, only, lambdas=[0.5])
    assert v.violation == pytest.approx(1.0, abs=1e-15)
    assert v.lam == 0.5
    est = estimate("star", f, only, x_star)
    assert not est.holds and est.constant == pytest.approx(-1.0)


def _points_trace(points):
    from wqcopt.core import IterateRecord, Trace

    t = Trace()
    for k, p in enumerate(points):
        t.append(IterateRecord(k, np.array(p, dtype=float), 0.0, 0.0))
    return t


def test_convex_quadratic_is_star_convex():
    q = random_quadratic(5, 50.0, seed=1, shift=True)
    v = check_star_convexity(q, q.minimizer(), box(-3, 3, 300))
    assert v.violation <= 1e-12


def test_star_rejects_lambda_outside_unit_interval():
    with pytest.raises(ValueError):
        check_star_convexity(square(), np.zeros(1), box(-1, 1, 5), lambdas=[1.5])


@pytest.mark.parametrize("entry", zoo(), ids=lambda e: e.name)
def test_crosscheck_verdicts_agree(entry):
    obj = entry.objective
    lo, hi = entry.box
    rep = lemma1_crosscheck(obj, entry.x_star, box(lo, hi, 300, seed=4))
    assert rep.agree, rep.summary()
    if entry.name == "sphere_quartic":
        assert not rep.wqc_holds and not rep.star_holds
    else:
        assert rep.wqc_holds and rep.star_holds


def test_crosscheck_summary_text():
    rep = lemma1_crosscheck(abs_one_minus_exp(), np.zeros(1), box(-10, 10, 50))
    assert "agree" in rep.summary()


def test_estimates_are_deterministic():
    f = abs_one_minus_exp()
    a = estimate_wqc_alpha(f, np.zeros(1), box(-10, 10, 500, seed=9))
    b = estimate_wqc_alpha(f, np.zeros(1), box(-10, 10, 500, seed=9))
    assert a.as_dict() == b.as_dict()


@settings(max_examples=25)
@given(st.integers(1, 400), st.integers(1, 400), st.integers(0, 100))
def test_more_samples_never_raise_the_infimum(n1, n2, seed):
    f = abs_one_minus_exp()
    small, large = sorted((n1, n2))
    a = estimate_wqc_alpha(f, np.zeros(1), box(-10, 10, small, seed)).raw_inf
    b = estimate_wqc_alpha(f, np.zeros(1), box(-10, 10, large, seed)).raw_inf
    assert b <= a


@settings(max_examples=25)
@given(st.integers(0, 1000))
def test_weak_pl_dominates_squared_wqc(seed):
    # Cauchy-Schwarz: (|g| |x - x*| / gap)^2 >= (<g, x - x*> / gap)^2 sample by sample
    q = random_quadratic(4, 20.0, seed, shift=True)
    s = box(-3, 3, 50, seed)
    x_star = q.minimizer()
    w = estimate_wqc_alpha(q, x_star, s).raw_inf
    assert estimate_weak_pl_mu(q, x_star, s).raw_inf >= w**2 * (1 - 1e-12)


@pytest.mark.parametrize("entry", zoo(), ids=lambda e: e.name)
def test_pl_on_samples_implies_qg_on_samples(entry):
    obj = entry.objective
    lo, hi = entry.box
    s = box(lo, hi, 1000, seed=5)
    pl, qg = estimate_pl_mu(obj, s), estimate_qg_mu(obj, s)
    if pl.constant > 0:
        assert qg.constant > 0


@pytest.mark.parametrize("entry", [e for e in zoo() if e.alpha_ref], ids=lambda e: e.name)
def test_reference_alpha_certified(entry):
    lo, hi = entry.box
    est = estimate_wqc_alpha(entry.objective, entry.x_star, box(lo, hi, 2000, seed=6))
    assert est.constant >= entry.alpha_ref * 0.95


@pytest.mark.parametrize("entry", [e for e in zoo() if e.mu_qg_ref], ids=lambda e: e.name)
def test_reference_qg_certified(entry):
    # the growth ratio is tightest near the origin for the quartic and everywhere for quad1d
    s = gaussian(0.0, 0.25, 4000, seed=6)
    est = estimate_qg_mu(entry.objective, s)
    assert est.constant >= entry.mu_qg_ref * (1 - 1e-9)
    if entry.name in ("quad1d", "sphere_quartic"):
        assert est.constant <= entry.mu_qg_ref * 1.05


def test_lipschitz_estimate_on_quadratic():
    q = random_quadratic(8, 30.0, seed=3, L=2.5)
    L = estimate_lipschitz(q, box(-1, 1, 20))
    assert L == pytest.approx(2.5, rel=1e-3)
    assert L <= 2.5 * (1 + 1e-6)


def test_dispatch_errors():
    with pytest.raises(ValueError, match="valid conditions"):
        estimate("convexity", square(), box(-1, 1, 5))
    blind = Objective(1, lambda x: float(x[0] ** 2), lambda x: 2 * x)
    with pytest.raises(ValueError):
        estimate("qg", blind, box(-1, 1, 5))
    with pytest.raises(ValueError, match="no admissible"):
        estimate_pl_mu(square(), box(0, 0, 5))


def test_wqc_ratios_skip_solution_set():
    ratios, pts, skipped = wqc_ratios(square(), np.zeros(1), box(0, 0, 3))
    assert ratios == [] and skipped == 3


def test_estimate_as_dict_is_json_ready():
    import json

    est = estimate("wqc", make_entry("quad1d").objective, box(-1, 1, 10))
    json.dumps(est.as_dict())
