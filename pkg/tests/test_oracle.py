import math

import numpy as np
import pytest

import oracles
from rhumbforge import example_fixture
from rhumbforge.errors import ValidationError
from rhumbforge.loxodrome import Family, slope
from rhumbforge.oracle import EXAMPLE_IDS, embed_loxodrome

PI = math.pi


@pytest.mark.parametrize("ex_id,arc", [("Ex1", 41.8343), ("Ex2", 7.1425), ("Ex3", 3.42788)])
def test_published_arc_lengths(ex_id, arc):
    assert example_fixture(ex_id).published_arc_length == arc


def test_fixture_parameters():
    ex1, ex2, ex3 = (example_fixture(i) for i in EXAMPLE_IDS)
    assert (ex1.surface.a, ex1.surface.b, ex1.spec.angle) == (0.0, 0.5, PI / 6)
    assert ex1.spec.span == (-2 * PI, 2 * PI) and ex1.spec.family is Family.MERIDIAN
    assert (ex2.surface.a, ex2.surface.b, ex2.spec.angle) == (1.0, 0.0, PI / 4)
    assert ex2.spec.span == (-PI, PI)
    assert (ex3.surface.a, ex3.surface.b, ex3.spec.angle) == (-1.0, 0.0, PI / 3)
    assert ex3.spec.family is Family.PARALLEL
    assert ex3.spec.span == (PI / 16, 2 * PI / 3)
    assert ex3.spec.start == (0.0, PI / 2)


def test_fixture_ids_are_case_insensitive_and_cached():
    assert example_fixture("ex2") is example_fixture("Ex2")


@pytest.mark.parametrize("bad", ["Ex4", "", "example1", None])
def test_unknown_id(bad):
    with pytest.raises(ValidationError):
        example_fixture(bad)


def test_closed_forms_pass_through_the_start():
    for ex_id in EXAMPLE_IDS:
        ex = example_fixture(ex_id)
        x0, y0 = ex.spec.start
        u0, v0 = (x0, y0) if ex.spec.family is Family.MERIDIAN else (y0, x0)
        assert ex.closed_form(u0) == pytest.approx(v0, abs=1e-15)


def test_explicit_curve_values():
    assert np.allclose(example_fixture("Ex1").embedding(0.0), (1.0, 0.0, 0.0), atol=1e-15)
    assert np.allclose(example_fixture("Ex2").embedding(0.0), (2.0, 0.0, 0.0), atol=1e-15)
    assert np.allclose(example_fixture("Ex3").embedding(PI / 2), (-1.0, 0.0, 1.0), atol=1e-15)


@pytest.mark.parametrize("ex_id", EXAMPLE_IDS)
def test_embedding_lies_on_surface(ex_id):
    ex = example_fixture(ex_id)
    curve = embed_loxodrome(ex)
    assert len(curve) == 201
    for u, v, p in zip(curve.u, curve.v, curve.points):
        x, y = (u, v) if ex.spec.family is Family.MERIDIAN else (v, u)
        assert np.max(np.abs(ex.surface.point(x, y) - p)) <= 1e-9


def test_ex2_embedding_needs_the_balanced_parenthesis():
    # the literal reading (1 + cos(2 arctan x) sin x) misses the torus
    ex = example_fixture("Ex2")
    x = 1.0
    w = 2 * math.atan(x)
    literal = 1 + math.cos(w) * math.sin(x)
    on_surface = ex.surface.point(x, ex.closed_form(x))[1]
    assert abs(literal - on_surface) > 0.1
    assert ex.embedding(x)[1] == pytest.approx(on_surface, abs=1e-15)


@pytest.mark.parametrize("ex_id", EXAMPLE_IDS)
def test_closed_form_solves_the_slope_field(ex_id):
    ex = example_fixture(ex_id)
    lo, hi = ex.spec.span
    worst = 0.0
    for u in np.linspace(lo, hi, 102)[1:-1]:
        v = ex.closed_form(u)
        x, y = (u, v) if ex.spec.family is Family.MERIDIAN else (v, u)
        field = slope(ex.surface, ex.spec.family, x, y, ex.spec.angle)
        fd = oracles.central_difference(ex.closed_form, u)
        worst = max(worst, abs(fd - field) / max(1.0, abs(field)))
    assert worst <= 1e-6


def test_ex1_first_value_is_not_a_range_endpoint():
    # the first published number is y(-2 pi) = exp(-sqrt(5/3) * 2 E(pi/2 | 4/5))
    ex = example_fixture("Ex1")
    assert ex.closed_form(-2 * PI) == pytest.approx(0.0476989, rel=1e-6)
    assert ex.closed_form(2 * PI) == pytest.approx(20.9649, rel=1e-5)


def test_tolerance_helpers():
    ex1, ex2 = example_fixture("Ex1"), example_fixture("Ex2")
    assert ex1.endpoint_ok(20.96486, 20.9649)
    assert not ex1.endpoint_ok(21.2, 20.9649)
    assert ex2.endpoint_ok(2.52575, 2.52525) and not ex2.endpoint_ok(2.527, 2.52525)
    assert ex1.arc_ok(41.83433) and not ex1.arc_ok(42.0)
