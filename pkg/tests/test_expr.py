import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rhumbforge.errors import EvaluationError, ExprSyntaxError
from rhumbforge.expr import (BinOp, Func, Neg, Num, Var, compile_expr, differentiate, evaluate,
                             is_constant, parse_expression, to_string)


def test_variable_node():
    assert parse_expression("y") == Var()


def test_cos_squared_structure():
    e = parse_expression("cos(y)^2")
    assert e == BinOp("^", Func("cos", Var()), Num(2.0))
    assert evaluate(e, 0.0) == 1.0


def test_sin_of_double_angle():
    assert evaluate(parse_expression("sin(2*y)"), math.pi / 4) == pytest.approx(1.0, abs=1e-15)


def test_unary_minus_binds_looser_than_power():
    assert parse_expression("-y^2") == Neg(BinOp("^", Var(), Num(2.0)))
    assert evaluate("-y^2", 3.0) == -9.0


def test_power_is_right_associative():
    assert evaluate("2^3^2", 0.0) == 512.0
    assert parse_expression("2^-y") == BinOp("^", Num(2.0), Neg(Var()))


@pytest.mark.parametrize("text,y,expected", [
    ("1 - 2 - 3", 0.0, -4.0),
    ("8 / 4 / 2", 0.0, 1.0),
    ("2 * y + 1", 3.0, 7.0),
    ("pi", 0.0, math.pi),
    ("e", 0.0, math.e),
    ("exp(ln(y))", 2.5, 2.5),
    ("sqrt(y) * sqrt(y)", 7.0, 7.0),
    ("tan(y)", math.pi / 4, 1.0),
    ("1.5e2 + .5", 0.0, 150.5),
])
def test_standard_reading(text, y, expected):
    assert evaluate(text, y) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_evaluate_examples():
    assert evaluate("y", 3.5) == 3.5
    assert evaluate("sin(y)^2", math.pi / 2) == 1.0


@pytest.mark.parametrize("text,y", [
    ("ln(y)", -1.0),
    ("ln(y)", 0.0),
    ("sqrt(y)", -0.5),
    ("1 / y", 0.0),
    ("(-2)^0.5", 0.0),
    ("exp(y)", 1000.0),
    ("1 / cos(y)^400", math.pi / 2),
])
def test_domain_errors(text, y):
    with pytest.raises(EvaluationError):
        evaluate(text, y)


@pytest.mark.parametrize("text,position", [
    ("", 0),
    ("   ", 0),
    ("y +", 3),
    ("foo(y)", 0),
    ("sin y", 4),
    ("(y", 2),
    ("y)", 1),
    ("2 $ y", 2),
    ("x + 1", 0),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression(text)
    assert info.value.position == position


def test_literal_overflow_rejected():
    with pytest.raises(ExprSyntaxError):
        parse_expression("1e999")


def test_determinism():
    text = "cos(y)^2 - 3*sin(y/2)^(1/3) + ln(2 + y^2)"
    assert parse_expression(text) == parse_expression(text)
    assert hash(parse_expression(text)) == hash(parse_expression(text))


@pytest.mark.parametrize("text,expected", [("y", 1.0), ("3", 0.0), ("pi*e", 0.0)])
def test_trivial_derivatives(text, expected):
    assert evaluate(differentiate(parse_expression(text)), 0.7) == expected


def test_derivative_of_cos_is_minus_sin():
    d = differentiate(parse_expression("cos(y)"))
    for y in (0.0, 0.4, 2.0):
        assert evaluate(d, y) == -math.sin(y)


def test_derivative_of_cos_squared_at_quarter_pi():
    # frozen from a central difference of cos^2 at pi/4, step 1e-6
    d = differentiate(parse_expression("cos(y)^2"))
    assert evaluate(d, math.pi / 4) == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("text", [
    "y^y", "(2 + sin(y))^(cos(y))", "sqrt(1 + y^2)", "tan(y/3)", "ln(2 + cos(y))",
    "y / (1 + y^2)", "exp(-y^2)", "-(y^3)", "e^y", "2^-y",
])
def test_derivative_rules(text):
    e = parse_expression(text)
    fn, dfn = compile_expr(e), compile_expr(differentiate(e))
    for y in (0.3, 0.9, 1.4):
        fd = oracles.central_difference(fn, y)
        assert abs(dfn(y) - fd) <= 1e-6 * (1 + abs(fd))


def test_generated_derivatives():
    rng = random.Random(1)
    lo, hi = oracles.EXPR_Y_RANGE
    for _ in range(50):
        e = parse_expression(oracles.random_expression(rng))
        fn, dfn = compile_expr(e), compile_expr(differentiate(e))
        for _ in range(5):
            y = rng.uniform(lo, hi)
            fd = oracles.central_difference(fn, y)
            assert abs(dfn(y) - fd) <= 1e-5 * (1 + abs(fd))


def test_compiled_matches_tree_walk():
    rng = random.Random(2)
    for _ in range(40):
        e = parse_expression(oracles.random_expression(rng))
        fn = compile_expr(e)
        for y in (-1.2, 0.0, 0.77):
            assert fn(y) == evaluate(e, y)


def test_compiled_raises_evaluation_error():
    with pytest.raises(EvaluationError):
        compile_expr(parse_expression("ln(y)"))(-1.0)


def test_is_constant():
    assert is_constant(parse_expression("pi/6 + 2^3"))
    assert not is_constant(parse_expression("1 + 0*y"))


# ---------------------------------------------------------------------------
# round trip over generated grammar text

_numbers = st.one_of(
    st.integers(0, 10 ** 6).map(str),
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(repr),
    st.sampled_from(["pi", "e", ".5", "2.", "1e-3", "3E+2"]),
)


def _grow(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*", "/", "^"]), children)
          .map(lambda t: f"{t[0]} {t[1]} {t[2]}"),
        children.map(lambda s: f"({s})"),
        children.map(lambda s: f"-{s}"),
        st.tuples(st.sampled_from(["sin", "cos", "tan", "exp", "ln", "sqrt"]), children)
          .map(lambda t: f"{t[0]}({t[1]})"),
    )


grammar_text = st.recursive(st.one_of(st.just("y"), _numbers), _grow, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(grammar_text)
def test_print_parse_round_trip(text):
    # generated text is not always grammatical ("--y"); only text that parses is compared
    try:
        tree = parse_expression(text)
    except ExprSyntaxError:
        return
    assert parse_expression(to_string(tree)) == tree


def test_negative_literal_node_prints_as_negation():
    # the grammar has no negative literals; hand-built Num(-1.5) comes back as Neg(Num(1.5))
    tree = BinOp("-", Num(-1.5), Var())
    assert parse_expression(to_string(tree)) == BinOp("-", Neg(Num(1.5)), Var())
