"""The three reference loxodromes with closed-form solutions.

Each fixture bundles a surface, a curve request, the separated-variables
solution ``v = closed_form(u)``, the explicit 3-D parametrization of the
curve, and the published range and arc length it is checked against.

* ``Ex1``: profile ``(y, 0)``, ``a = 0``, ``b = 1/2``, meridian family,
  ``phi = pi/6``. Solution ``y = exp(sqrt(5) tan(phi) E(x/2 | 4/5))``.
* ``Ex2``: profile ``(cos y, sin y)``, ``a = 1``, ``b = 0`` (a torus),
  meridian family, ``phi = pi/4``. Solution ``y = 2 arctan(x tan(phi))``.
* ``Ex3``: profile ``(cos^2 y, sin^2 y)``, ``a = -1``, ``b = 0``, parallel
  family, ``theta = pi/3``. Solution ``x = 2 sqrt(2) ln(sin y) tan(theta)``.
  The profile retraces itself at ``y = pi/2``, where the curve starts.

The published explicit form of the Ex2 curve has an unbalanced parenthesis
in its second component, ``(1+cos(2 arctan x) sin x``; it is read here as
``(1 + cos(2 arctan x)) sin x``, the only reading that lies on the surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .loxodrome import Family, LoxodromeSpec
from .numerics import Polyline, direction_field, elliptic_E_incomplete, make_polyline
from .surface import ProfileCurve, TwistedSurface

__all__ = ["PaperExample", "EXAMPLE_IDS", "example_fixture", "embed_loxodrome"]

EXAMPLE_IDS = ("Ex1", "Ex2", "Ex3")
PI = math.pi


@dataclass(frozen=True)
class PaperExample:
    id: str
    surface: TwistedSurface
    spec: LoxodromeSpec
    closed_form: Callable[[float], float]
    embedding: Callable[[float], np.ndarray]
    published_range: tuple
    published_arc_length: float
    # endpoint tolerance: ("rel", r) or ("abs", a); arc length is relative
    range_tol: tuple
    arc_rtol: float = 1.5e-3

    def endpoint_ok(self, computed: float, published: float) -> bool:
        kind, tol = self.range_tol
        if kind == "rel":
            return abs(computed - published) <= tol * abs(published)
        return abs(computed - published) <= tol

    def arc_ok(self, computed: float) -> bool:
        return abs(computed - self.published_arc_length) <= self.arc_rtol * self.published_arc_length


def _ex1():
    tan_phi = math.tan(PI / 6)
    k = math.sqrt(5.0) * tan_phi   # = sqrt(5/3)

    def closed_form(x):
        return math.exp(k * elliptic_E_incomplete(0.5 * x, 0.8))

    def embedding(x):
        r = math.exp(math.sqrt(5.0 / 3.0) * elliptic_E_incomplete(0.5 * x, 0.8))
        return r * np.array([math.cos(x / 2) * math.cos(x), math.cos(x / 2) * math.sin(x),
                             math.sin(x / 2)])

    surface = TwistedSurface(0.0, 0.5, ProfileCurve("y", "0", (0.01, 25.0)))
    spec = LoxodromeSpec(Family.MERIDIAN, PI / 6, (0.0, 1.0), (-2 * PI, 2 * PI))
    return PaperExample("Ex1", surface, spec, closed_form, embedding,
                        (0.0476989, 20.9649), 41.8343, ("rel", 5e-3))


def _ex2():
    tan_phi = math.tan(PI / 4)

    def closed_form(x):
        return 2.0 * math.atan(x * tan_phi)

    def embedding(x):
        w = 2.0 * math.atan(x)
        return np.array([(1.0 + math.cos(w)) * math.cos(x), (1.0 + math.cos(w)) * math.sin(x),
                         math.sin(w)])

    surface = TwistedSurface(1.0, 0.0, ProfileCurve("cos(y)", "sin(y)", (-3.0, 3.0)),
                             x_domain=(-PI, PI))
    spec = LoxodromeSpec(Family.MERIDIAN, PI / 4, (0.0, 0.0), (-PI, PI))
    return PaperExample("Ex2", surface, spec, closed_form, embedding,
                        (-2.52525, 2.52525), 7.1425, ("abs", 1e-3))


def _ex3():
    tan_theta = math.tan(PI / 3)

    def closed_form(y):
        return 2.0 * math.sqrt(2.0) * math.log(math.sin(y)) * tan_theta

    def embedding(y):
        s2 = math.sin(y) ** 2
        w = 2.0 * math.sqrt(6.0) * math.log(math.sin(y))
        return np.array([-s2 * math.cos(w), -s2 * math.sin(w), s2])

    profile = ProfileCurve("cos(y)^2", "sin(y)^2", (PI / 16, 2 * PI / 3))
    surface = TwistedSurface(-1.0, 0.0, profile, x_domain=(-3 * PI, 3 * PI))
    spec = LoxodromeSpec(Family.PARALLEL, PI / 3, (0.0, PI / 2), (PI / 16, 2 * PI / 3))
    return PaperExample("Ex3", surface, spec, closed_form, embedding,
                        (-8.00637, -0.704674), 3.42788, ("rel", 1e-3))


_BUILDERS = {"Ex1": _ex1, "Ex2": _ex2, "Ex3": _ex3}
_CACHE = {}


def example_fixture(example_id: str) -> PaperExample:
    """Return the fixture for ``'Ex1'``, ``'Ex2'`` or ``'Ex3'`` (case-insensitive)."""
    key = str(example_id).strip().capitalize()
    if key not in _BUILDERS:
        raise ValidationError(f"unknown example {example_id!r}; expected one of {EXAMPLE_IDS}")
    if key not in _CACHE:
        _CACHE[key] = _BUILDERS[key]()
    return _CACHE[key]


def embed_loxodrome(example: PaperExample, n: int = 201) -> Polyline:
    """Sample the explicit 3-D form of the example's curve over its span.

    ``points`` come from the explicit parametrization; ``u``/``v`` from the
    closed-form solution, so ``points[i]`` can be compared with the surface
    evaluated at the same parameters.
    """
    lo, hi = example.spec.span
    u = np.linspace(lo, hi, int(n))
    v = np.array([example.closed_form(t) for t in u])
    curve = make_polyline(example.surface, example.spec.family, u, v,
                          slope=direction_field(example.surface, example.spec),
                          path=example.closed_form)
    curve.points = np.array([example.embedding(t) for t in u])
    return curve
