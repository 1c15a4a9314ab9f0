"""Expressions in one variable ``y``: parsing, symbolic derivatives, evaluation.

Grammar (``^`` is right-associative, unary minus binds looser than ``^``)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ['-'] power
    power  := atom ['^' factor]
    atom   := number | 'y' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
    func   := 'sin' | 'cos' | 'tan' | 'exp' | 'ln' | 'sqrt'

So ``-y^2`` reads as ``-(y^2)`` and ``2^-y`` as ``2^(-y)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

from .errors import EvaluationError, ExprSyntaxError

__all__ = [
    "Expr", "Num", "Var", "Neg", "Func", "BinOp",
    "parse_expression", "differentiate", "evaluate", "to_string",
    "compile_expr", "is_constant", "FUNCTIONS",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Var, Neg, Func, BinOp]

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt")
_CONSTANTS = {"pi": math.pi, "e": math.e}

Y = Var()
ZERO = Num(0.0)
ONE = Num(1.0)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(src):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        if self.peek()[0] == "end":
            raise ExprSyntaxError("empty expression", 0)
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.power())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"numeric literal {text!r} overflows", pos)
            return Num(value)
        if kind == "name":
            if text == "y":
                return Y
            if text in _CONSTANTS:
                return Num(_CONSTANTS[text])
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            raise ExprSyntaxError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"expected a number, 'y', a function or '(', found {found}", pos)


def parse_expression(src: str) -> Expr:
    """Parse ``src`` into an expression tree.

    Raises :class:`ExprSyntaxError` (with the offending column) for empty
    input, unknown identifiers and malformed text.
    """
    if not isinstance(src, str):
        raise ExprSyntaxError(f"expression must be text, got {type(src).__name__}")
    return _Parser(src).parse()


def to_string(e: Expr) -> str:
    """Print ``e`` so that ``parse_expression(to_string(e)) == e``.

    Every printed sub-expression is an atom of the grammar, which is what
    makes the round trip exact regardless of context. This holds for every
    tree the parser can produce; a hand-built negative ``Num`` prints as a
    negation and re-parses as ``Neg(Num(...))``.
    """
    if isinstance(e, Num):
        return repr(e.value) if e.value >= 0 else f"(-{(-e.value)!r})"
    if isinstance(e, Var):
        return "y"
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    return f"({to_string(e.left)} {e.op} {to_string(e.right)})"


def is_constant(e: Expr) -> bool:
    """True when ``e`` does not depend on ``y``."""
    if isinstance(e, Num):
        return True
    if isinstance(e, Var):
        return False
    if isinstance(e, (Neg, Func)):
        return is_constant(e.arg)
    return is_constant(e.left) and is_constant(e.right)


# ---------------------------------------------------------------------------
# differentiation

def differentiate(e: Expr) -> Expr:
    """Return d e / dy (``e`` may be text). The result is not simplified."""
    if isinstance(e, str):
        e = parse_expression(e)
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Neg):
        return Neg(differentiate(e.arg))
    if isinstance(e, Func):
        u = e.arg
        du = differentiate(u)
        if e.name == "sin":
            outer = Func("cos", u)
        elif e.name == "cos":
            outer = Neg(Func("sin", u))
        elif e.name == "tan":
            outer = BinOp("/", ONE, BinOp("^", Func("cos", u), Num(2.0)))
        elif e.name == "exp":
            outer = e
        elif e.name == "ln":
            return BinOp("/", du, u)
        elif e.name == "sqrt":
            return BinOp("/", du, BinOp("*", Num(2.0), e))
        else:  # pragma: no cover - parser admits only FUNCTIONS
            raise ValueError(f"unknown function {e.name!r}")
        return BinOp("*", outer, du)

    op, u, v = e.op, e.left, e.right
    if op in ("+", "-"):
        return BinOp(op, differentiate(u), differentiate(v))
    if op == "*":
        return BinOp("+", BinOp("*", differentiate(u), v), BinOp("*", u, differentiate(v)))
    if op == "/":
        num = BinOp("-", BinOp("*", differentiate(u), v), BinOp("*", u, differentiate(v)))
        return BinOp("/", num, BinOp("^", v, Num(2.0)))
    # power
    if is_constant(v):
        return BinOp("*", BinOp("*", v, BinOp("^", u, BinOp("-", v, ONE))), differentiate(u))
    # u^v = exp(v ln u)
    inner = BinOp("+", BinOp("*", differentiate(v), Func("ln", u)),
                  BinOp("/", BinOp("*", v, differentiate(u)), u))
    return BinOp("*", e, inner)


# ---------------------------------------------------------------------------
# evaluation

_MATH = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "ln": math.log, "sqrt": math.sqrt,
}
_ARITH_ERRORS = (ValueError, ZeroDivisionError, OverflowError)


def _eval(e, y):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return y
    if isinstance(e, Neg):
        return -_eval(e.arg, y)
    if isinstance(e, Func):
        return _MATH[e.name](_eval(e.arg, y))
    a = _eval(e.left, y)
    b = _eval(e.right, y)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        return a / b
    return math.pow(a, b)


def evaluate(e: Expr, y: float) -> float:
    """Evaluate ``e`` at ``y`` by walking the tree.

    Raises :class:`EvaluationError` on a domain violation (``ln`` of a
    non-positive number, ``sqrt`` of a negative, division by zero, negative
    base with fractional exponent) or a non-finite result. ``e`` may be
    given as text.
    """
    if isinstance(e, str):
        e = parse_expression(e)
    try:
        value = _eval(e, float(y))
    except _ARITH_ERRORS as exc:
        raise EvaluationError(f"cannot evaluate {to_string(e)} at y={y!r}: {exc}") from None
    if not math.isfinite(value):
        raise EvaluationError(f"{to_string(e)} is not finite at y={y!r}")
    return value


def _source(e):
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return "y"
    if isinstance(e, Neg):
        return f"(-{_source(e.arg)})"
    if isinstance(e, Func):
        return f"_{e.name}({_source(e.arg)})"
    if e.op == "^":
        return f"_pow({_source(e.left)}, {_source(e.right)})"
    return f"({_source(e.left)} {e.op} {_source(e.right)})"


@lru_cache(maxsize=256)
def compile_expr(e: Expr) -> Callable[[float], float]:
    """Compile ``e`` into a fast scalar function with ``evaluate``'s semantics."""
    namespace = {f"_{k}": v for k, v in _MATH.items()}
    namespace.update(_pow=math.pow, _isfinite=math.isfinite, _errors=_ARITH_ERRORS,
                     _EvaluationError=EvaluationError, _text=to_string(e))
    code = (
        "def _f(y):\n"
        "    try:\n"
        f"        v = {_source(e)}\n"
        "    except _errors as exc:\n"
        "        raise _EvaluationError(f'cannot evaluate {_text} at y={y!r}: {exc}') from None\n"
        "    if not _isfinite(v):\n"
        "        raise _EvaluationError(f'{_text} is not finite at y={y!r}')\n"
        "    return v\n"
    )
    exec(code, namespace)
    return namespace["_f"]
