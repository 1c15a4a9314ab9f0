import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp
from scipy.integrate._ivp.rk import RK45
from scipy.special import ellipeinc

import oracles
from rhumbforge import example_fixture
from rhumbforge.errors import (DomainExit, QuadratureError, SingularityHit, StepUnderflow,
                               ValidationError)
from rhumbforge.loxodrome import LoxodromeSpec
from rhumbforge.numerics import (_B, _E, _P, _WG, _WGK, _XGK, IntegratorConfig, adaptive_simpson,
                                 arc_length, coordinate_curve, cumulative_arc_length,
                                 dormand_prince, elliptic_E_incomplete, gauss_kronrod,
                                 integrate_loxodrome, make_polyline, max_angle_deviation)
from rhumbforge.surface import ProfileCurve, TwistedSurface

PI = math.pi


# ---------------------------------------------------------------------------
# tableau

def test_dense_output_coefficients_match_reference():
    assert np.allclose(np.array(_P), RK45.P, rtol=0, atol=1e-15)


def test_weights_and_error_coefficients():
    assert np.allclose(_B, RK45.B, atol=1e-16)
    # scipy stores the error weights with the opposite sign
    assert np.allclose(_E, -RK45.E, atol=1e-16)
    assert math.fsum(_B) == pytest.approx(1.0, abs=1e-15)
    assert math.fsum(_E) == pytest.approx(0.0, abs=1e-16)


def test_kronrod_rule():
    total = _WGK[7] + 2 * sum(_WGK[:7])
    assert total == pytest.approx(2.0, abs=1e-15)
    assert _WG[3] + 2 * sum(_WG[:3]) == pytest.approx(2.0, abs=1e-15)
    # exact for polynomials of degree 22 on [-1, 1]
    assert gauss_kronrod(lambda t: t ** 22, -1.0, 1.0) == pytest.approx(2 / 23, rel=1e-14)
    assert float(Fraction(_XGK[7])) == 0.0


# ---------------------------------------------------------------------------
# Dormand-Prince on problems with known solutions

def test_dormand_prince_exponential():
    us, vs, dense = dormand_prince(lambda u, v: v, 0.0, 1.0, 2.0)
    assert vs[-1] == pytest.approx(math.exp(2.0), rel=1e-9)
    for t in np.linspace(0, 2, 37):
        assert dense(t) == pytest.approx(math.exp(t), rel=1e-9)
    assert max(np.diff(us)) <= 0.05 + 1e-15


def test_dormand_prince_backwards_against_scipy():
    fun = lambda u, v: math.cos(u) * v - 0.1 * v * v
    us, vs, _ = dormand_prince(fun, 1.0, 0.5, -3.0)
    ref = solve_ivp(lambda t, y: [fun(t, y[0])], (1.0, -3.0), [0.5], rtol=1e-12, atol=1e-13)
    assert vs[-1] == pytest.approx(ref.y[0, -1], rel=1e-8)


def test_dormand_prince_zero_span():
    us, vs, dense = dormand_prince(lambda u, v: 1.0, 2.0, 3.0, 2.0)
    assert (us, vs, len(dense)) == ([2.0], [3.0], 0)


def test_dormand_prince_domain_exit_located():
    with pytest.raises(DomainExit) as info:
        dormand_prince(lambda u, v: 1.0, 0.0, 0.0, 5.0, v_bounds=(-1.0, 2.0))
    u, v = info.value.location
    assert u == pytest.approx(2.0, abs=1e-12) and v == pytest.approx(2.0, abs=1e-12)
    us, vs, _ = info.value.partial
    assert us[-1] == u


def test_dormand_prince_step_underflow():
    cfg = IntegratorConfig(abs_tol=1e-14, rel_tol=1e-14, min_step=1e-3)
    with pytest.raises(StepUnderflow):
        dormand_prince(lambda u, v: 1.0 / (1.0 - u) ** 2, 0.0, 0.0, 0.999, cfg)


def test_config_validation():
    with pytest.raises(ValidationError):
        IntegratorConfig(abs_tol=0.0)
    with pytest.raises(ValidationError):
        IntegratorConfig(min_step=0.1, max_step=0.05)
    assert IntegratorConfig.with_tol(1e-8).rel_tol == 1e-8


# ---------------------------------------------------------------------------
# quadrature

def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0.0, PI) == pytest.approx(2.0, abs=1e-10)
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0
    assert adaptive_simpson(lambda t: t ** 3, -1.0, 2.0) == pytest.approx(3.75, abs=1e-14)


def test_adaptive_simpson_reports_nonconvergence():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda t: 1.0 if t > 0.3 else 0.0, 0.0, 1.0, tol=1e-15, max_depth=8)


def test_gauss_kronrod_against_quad():
    fun = lambda t: math.exp(-t * t) * math.cos(3 * t)
    ref, _ = quad(fun, -2.0, 5.0, epsabs=1e-14)
    assert gauss_kronrod(fun, -2.0, 5.0) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("phi,m", [(0.3, 0.5), (PI / 2, 0.8), (2.0, 0.99), (-1.2, 0.3), (7.5, 0.8), (PI, 1.0)])
def test_elliptic_against_scipy(phi, m):
    assert elliptic_E_incomplete(phi, m) == pytest.approx(float(ellipeinc(phi, m)), abs=1e-12)


def test_elliptic_examples():
    assert elliptic_E_incomplete(0.0, 0.8) == 0.0
    assert elliptic_E_incomplete(PI / 2, 0.0) == pytest.approx(PI / 2, abs=1e-15)
    # frozen from an independent quadrature of sqrt(1 - 0.8 sin^2 t) over [0, pi/2]
    assert elliptic_E_incomplete(PI / 2, 0.8) == pytest.approx(1.1784899243278388, abs=1e-13)


@pytest.mark.parametrize("m", [0.0, 0.3, 0.8])
def test_elliptic_quarter_period(m):
    assert abs(elliptic_E_incomplete(PI, m) - 2 * elliptic_E_incomplete(PI / 2, m)) <= 1e-12


def test_elliptic_domain():
    from rhumbforge.errors import EvaluationError
    with pytest.raises(EvaluationError):
        elliptic_E_incomplete(PI / 2, 1.5)
    # m > 1 is fine while m sin^2 t stays below 1
    ref, _ = quad(lambda t: math.sqrt(1 - 2.0 * math.sin(t) ** 2), 0.0, 0.5, epsabs=1e-14)
    assert elliptic_E_incomplete(0.5, 2.0) == pytest.approx(ref, abs=1e-12)


# ---------------------------------------------------------------------------
# loxodromes

def test_torus_meridian_length():
    surface = example_fixture("Ex2").surface
    curve = coordinate_curve(surface, "meridian", 0.0, (0.0, 2 * PI))
    assert arc_length(surface, curve) == pytest.approx(4 * PI, rel=1e-12)


def test_arc_length_additive():
    ex = example_fixture("Ex1")
    whole = integrate_loxodrome(ex.surface, ex.spec)
    left = integrate_loxodrome(ex.surface, LoxodromeSpec("meridian", PI / 6, (0.0, 1.0), (-2 * PI, 0.0)))
    right = integrate_loxodrome(ex.surface, LoxodromeSpec("meridian", PI / 6, (0.0, 1.0), (0.0, 2 * PI)))
    assert left.length + right.length == pytest.approx(whole.length, rel=1e-9)


def test_cumulative_length_is_monotone_from_zero():
    ex = example_fixture("Ex2")
    curve = integrate_loxodrome(ex.surface, ex.spec)
    assert curve.s[0] == 0.0
    assert np.all(np.diff(curve.s) > 0)
    assert np.all(np.diff(curve.u) > 0)
    assert np.max(np.diff(curve.u)) <= 0.05 + 1e-12


def test_points_lie_on_surface():
    ex = example_fixture("Ex1")
    curve = integrate_loxodrome(ex.surface, ex.spec)
    for u, v, p in zip(curve.u[::17], curve.v[::17], curve.points[::17]):
        assert np.array_equal(p, ex.surface.point(u, v))


def test_arc_length_from_samples_only():
    ex = example_fixture("Ex2")
    curve = integrate_loxodrome(ex.surface, ex.spec)
    bare = make_polyline(ex.surface, "meridian", curve.u, curve.v)
    assert arc_length(ex.surface, bare) == pytest.approx(curve.length, rel=1e-6)


def test_near_zero_angle_stays_on_meridian():
    ex = example_fixture("Ex2")
    spec = LoxodromeSpec("meridian", 1e-8, (0.0, 0.5), (-PI, PI))
    curve = integrate_loxodrome(ex.surface, spec)
    assert np.max(np.abs(curve.v - 0.5)) < 1e-6


def test_cone_pole_is_a_singularity():
    # x grows like ln(y) towards the pole, so the x-domain is wide
    surface = TwistedSurface(0.0, 0.5, ProfileCurve("y", "0", (0.0, 2.0)), x_domain=(-100, 100),
                             grid=None)
    spec = LoxodromeSpec("parallel", PI / 4, (0.0, 1.0), (0.0, 1.0))
    with pytest.raises(SingularityHit) as info:
        integrate_loxodrome(surface, spec)
    partial = info.value.partial
    assert len(partial) > 1 and partial.u[0] < 1e-3


def test_domain_exit_carries_partial_curve():
    ex = example_fixture("Ex2")
    spec = LoxodromeSpec("meridian", 1.4, (0.0, 0.0), (-PI, PI))
    with pytest.raises(DomainExit) as info:
        integrate_loxodrome(ex.surface, spec)
    assert abs(info.value.location[1]) == pytest.approx(3.0, abs=1e-12)
    assert np.all(np.isfinite(info.value.partial.s))


def test_singular_start_reported():
    ex = example_fixture("Ex2")
    spec = LoxodromeSpec("meridian", PI / 2, (0.0, 0.0), (-1.0, 1.0))
    with pytest.raises(SingularityHit) as info:
        integrate_loxodrome(ex.surface, spec)
    assert type(info.value.__cause__).__name__ == "SingularDenominator"


def test_tolerance_convergence():
    ex = example_fixture("Ex1")
    coarse = integrate_loxodrome(ex.surface, ex.spec)
    fine_cfg = IntegratorConfig(abs_tol=5e-11, rel_tol=5e-11, max_step=0.025)
    spec = LoxodromeSpec(ex.spec.family, ex.spec.angle, ex.spec.start, ex.spec.span, config=fine_cfg)
    fine = integrate_loxodrome(ex.surface, spec)
    exact = ex.closed_form(2 * PI)
    change = abs(fine.v[-1] - coarse.v[-1])
    assert change < abs(coarse.v[-1] - exact) + 1e-10 * exact
    assert abs(fine.v[-1] - exact) <= abs(coarse.v[-1] - exact) + 1e-12 * exact


@pytest.mark.parametrize("ex_id", ["Ex1", "Ex2", "Ex3"])
def test_closed_form_tracking(ex_id):
    ex = example_fixture(ex_id)
    curve = integrate_loxodrome(ex.surface, ex.spec)
    for u, v in zip(curve.u, curve.v):
        exact = ex.closed_form(u)
        assert abs(v - exact) <= (1e-6 * abs(exact) if ex_id == "Ex1" else 1e-8)


def test_angle_constancy_on_examples():
    for ex_id in ("Ex1", "Ex2", "Ex3"):
        ex = example_fixture(ex_id)
        curve = integrate_loxodrome(ex.surface, ex.spec)
        assert max_angle_deviation(ex.surface, curve, ex.spec.angle) <= 1e-6


def test_skipping_arc_length():
    ex = example_fixture("Ex2")
    curve = integrate_loxodrome(ex.surface, ex.spec, arc_length=False)
    assert np.all(np.isnan(curve.s))
    assert cumulative_arc_length(ex.surface, curve)[-1] == pytest.approx(7.1425, rel=1.5e-3)


def test_angle_deviation_on_twisted_catalog():
    for label, surface in oracles.catalog_surfaces():
        if surface.b == 0.0:
            continue
        x0 = 0.2
        y0 = sum(surface.y_domain) / 2
        spec = LoxodromeSpec("meridian", 0.4, (x0, y0), (x0 - 0.2, x0 + 0.2))
        curve = integrate_loxodrome(surface, spec, arc_length=False)
        assert max_angle_deviation(surface, curve, 0.4) <= 1e-6
