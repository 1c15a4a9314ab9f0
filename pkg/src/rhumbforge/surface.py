"""Twisted surfaces in Euclidean 3-space.

A planar profile ``(f(y), 0, g(y))`` is rotated by ``b*x`` about the line
through ``(a, 0, 0)`` parallel to the y-axis, then by ``x`` about the
z-axis::

    r(x, y) = a + f cos(bx) - g sin(bx)
    T(x, y) = (r cos x, r sin x, f sin(bx) + g cos(bx))

With ``b = 0`` this is the surface of revolution of the profile about the
z-axis, offset by ``a``.

Naming follows the loxodrome literature this package serves: a *meridian* is
a curve with ``y`` held constant (tangent ``T_x``), a *parallel* one with
``x`` held constant (tangent ``T_y``). This is the reverse of the usual
convention for surfaces of revolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import EvaluationError, ValidationError
from .expr import Expr, compile_expr, differentiate, parse_expression, to_string

__all__ = [
    "inner", "norm", "angle_between",
    "ProfileCurve", "TwistedSurface", "MetricCoeffs",
    "eval_point", "eval_partials", "metric",
    "surface_from_record", "surface_to_record",
]

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# vectors

def inner(u, v) -> float:
    return float(u[0] * v[0] + u[1] * v[1] + u[2] * v[2])


def norm(u) -> float:
    return math.sqrt(inner(u, u))


def angle_between(u, v) -> float:
    """Angle in [0, pi] between two nonzero vectors."""
    nu, nv = norm(u), norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("angle with a zero vector is undefined")
    c = inner(u, v) / (nu * nv)
    return math.acos(min(1.0, max(-1.0, c)))


# ---------------------------------------------------------------------------
# profile

def _interval(value, name):
    try:
        lo, hi = (float(t) for t in value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a pair of numbers, got {value!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValidationError(f"{name} must satisfy lo < hi, got [{lo}, {hi}]")
    return lo, hi


def _as_expr(e):
    return parse_expression(e) if isinstance(e, str) else e


@dataclass(frozen=True)
class ProfileCurve:
    """Planar generator ``alpha(y) = (f(y), 0, g(y))`` on a closed y-interval.

    ``f_prime`` and ``g_prime`` are the symbolic derivatives of ``f`` and
    ``g``. On construction the profile is sampled ``samples`` times: every
    sample must evaluate and have nonzero speed ``f'^2 + g'^2``.

    Points where the velocity passes through zero and reverses direction
    (the profile retraces itself, as ``(cos^2 y, sin^2 y)`` does at
    ``y = pi/2``) are located and stored in ``reversals``. Across such a
    point the speed is continued analytically with a sign change;
    :meth:`orientation` returns that sign, +1 at the lower end of the domain.
    """

    f: Expr
    g: Expr
    domain: tuple
    samples: int = 1024
    f_prime: Expr = field(init=False)
    g_prime: Expr = field(init=False)
    reversals: tuple = field(init=False)
    _fns: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "f", _as_expr(self.f))
        set_(self, "g", _as_expr(self.g))
        set_(self, "domain", _interval(self.domain, "y_domain"))
        if int(self.samples) < 2:
            raise ValidationError("profile sample count must be >= 2")
        set_(self, "f_prime", differentiate(self.f))
        set_(self, "g_prime", differentiate(self.g))
        set_(self, "_fns", tuple(compile_expr(e) for e in (self.f, self.g, self.f_prime, self.g_prime)))
        set_(self, "reversals", self._find_reversals())

    @classmethod
    def from_strings(cls, f: str, g: str, domain, samples: int = 1024) -> "ProfileCurve":
        return cls(parse_expression(f), parse_expression(g), tuple(domain), samples)

    def fn(self, y):
        return self._fns[0](y)

    def gn(self, y):
        return self._fns[1](y)

    def values(self, y):
        """``(f, g, f', g')`` at ``y``."""
        f, g, fp, gp = self._fns
        return f(y), g(y), fp(y), gp(y)

    def orientation(self, y: float) -> int:
        sign = 1
        for r in self.reversals:
            if y > r:
                sign = -sign
        return sign

    def contains(self, y: float) -> bool:
        return self.domain[0] <= y <= self.domain[1]

    def _find_reversals(self):
        f, g, fp, gp = self._fns
        ys = np.linspace(self.domain[0], self.domain[1], int(self.samples))
        prev = None          # (y, unit tangent) of the last sample with nonzero speed
        stationary = []      # zero-speed samples since `prev`
        found = []
        for y in ys:
            y = float(y)
            try:
                f(y)
                g(y)
                dx, dz = fp(y), gp(y)
            except EvaluationError as exc:
                raise ValidationError(f"profile is not defined on its domain: {exc}") from None
            speed = math.hypot(dx, dz)
            if speed == 0.0:
                stationary.append(y)
                continue
            t = (dx / speed, dz / speed)
            if prev is not None:
                y0, t0 = prev
                flipped = t0[0] * t[0] + t0[1] * t[1] < 0.0
                if flipped:
                    if stationary:
                        found.append(stationary[len(stationary) // 2])
                    else:
                        along = lambda s, t0=t0: fp(s) * t0[0] + gp(s) * t0[1]
                        found.append(brentq(along, y0, y, xtol=1e-15))
                elif stationary:
                    raise ValidationError(
                        f"profile is not regular: f'^2 + g'^2 = 0 at y = {stationary[0]!r}")
            elif stationary:
                raise ValidationError(
                    f"profile is not regular: f'^2 + g'^2 = 0 at y = {stationary[0]!r}")
            prev = (y, t)
            stationary = []
        if stationary or prev is None:
            y_bad = stationary[0] if stationary else float(ys[0])
            raise ValidationError(f"profile is not regular: f'^2 + g'^2 = 0 at y = {y_bad!r}")
        return tuple(found)


# ---------------------------------------------------------------------------
# surface

class MetricCoeffs(NamedTuple):
    g11: float
    g12: float
    g22: float

    @property
    def det(self) -> float:
        return self.g11 * self.g22 - self.g12 * self.g12


@dataclass(frozen=True)
class TwistedSurface:
    """Twisted surface with offset ``a``, twist rate ``b`` and a profile.

    ``grid`` is the (nx, ny) sample grid on which regularity
    (``g11*g22 - g12**2 > 0``) is checked at construction; ``None`` skips the
    check, which is needed to study surfaces with degenerate points on
    purpose.
    """

    a: float
    b: float
    profile: ProfileCurve
    x_domain: tuple = (-TWO_PI, TWO_PI)
    grid: Sequence[int] | None = (64, 64)

    def __post_init__(self):
        for name in ("a", "b"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "x_domain", _interval(self.x_domain, "x_domain"))
        if self.grid is not None:
            nx, ny = (int(n) for n in self.grid)
            if nx < 2 or ny < 2:
                raise ValidationError("regularity grid needs at least 2x2 samples")
            object.__setattr__(self, "grid", (nx, ny))
            self._check_regular(nx, ny)

    @property
    def y_domain(self):
        return self.profile.domain

    def contains(self, x: float, y: float) -> bool:
        return (self.x_domain[0] <= x <= self.x_domain[1]) and self.profile.contains(y)

    def _check_regular(self, nx, ny):
        xs = np.linspace(*self.x_domain, nx)
        for y in np.linspace(*self.y_domain, ny):
            y = float(y)
            if any(abs(y - r) <= 1e-12 * max(1.0, abs(r)) for r in self.profile.reversals):
                continue
            for x in xs:
                m = self.metric(float(x), y)
                if not m.det > 0.0:
                    raise ValidationError(
                        f"surface is not regular: g11*g22 - g12^2 = {m.det:.3g} "
                        f"at (x, y) = ({x:.6g}, {y:.6g})")

    def point(self, x: float, y: float) -> np.ndarray:
        f, g = self.profile.fn(y), self.profile.gn(y)
        c, s = math.cos(self.b * x), math.sin(self.b * x)
        r = self.a + f * c - g * s
        return np.array([r * math.cos(x), r * math.sin(x), f * s + g * c])

    def partials(self, x: float, y: float):
        f, g, fp, gp = self.profile.values(y)
        b = self.b
        c, s = math.cos(b * x), math.sin(b * x)
        cx, sx = math.cos(x), math.sin(x)
        r = self.a + f * c - g * s
        r_x = -b * (f * s + g * c)
        r_y = fp * c - gp * s
        t_x = np.array([r_x * cx - r * sx, r_x * sx + r * cx, b * (f * c - g * s)])
        t_y = np.array([r_y * cx, r_y * sx, fp * s + gp * c])
        return t_x, t_y

    def metric(self, x: float, y: float) -> MetricCoeffs:
        f, g, fp, gp = self.profile.values(y)
        a, b = self.a, self.b
        bx = b * x
        c, s, c2 = math.cos(bx), math.sin(bx), math.cos(2.0 * bx)
        g11 = 0.5 * (2.0 * a * a + (1.0 + 2.0 * b * b + c2) * f * f
                     + (1.0 + 2.0 * b * b - c2) * g * g
                     - 4.0 * a * g * s + 4.0 * f * c * (a - g * s))
        g12 = b * (f * gp - fp * g)
        g22 = fp * fp + gp * gp
        return MetricCoeffs(g11, g12, g22)


def eval_point(surface: TwistedSurface, x: float, y: float) -> np.ndarray:
    return surface.point(x, y)


def eval_partials(surface: TwistedSurface, x: float, y: float):
    """``(T_x, T_y)`` at ``(x, y)``, from the closed-form derivatives."""
    return surface.partials(x, y)


def metric(surface: TwistedSurface, x: float, y: float) -> MetricCoeffs:
    return surface.metric(x, y)


# ---------------------------------------------------------------------------
# JSON records

def surface_from_record(record: dict, grid=(64, 64), samples: int = 1024) -> TwistedSurface:
    """Build a surface from ``{"a", "b", "f", "g", "y_domain", "x_domain"}``."""
    if not isinstance(record, dict):
        raise ValidationError("surface record must be a JSON object")
    missing = [k for k in ("a", "b", "f", "g", "y_domain") if k not in record]
    if missing:
        raise ValidationError(f"surface record is missing {', '.join(missing)}")
    try:
        a, b = float(record["a"]), float(record["b"])
    except (TypeError, ValueError):
        raise ValidationError("surface record: a and b must be numbers") from None
    profile = ProfileCurve(record["f"], record["g"], tuple(record["y_domain"]), samples)
    x_domain = tuple(record.get("x_domain", (-TWO_PI, TWO_PI)))
    return TwistedSurface(a, b, profile, x_domain, grid)


def surface_to_record(surface: TwistedSurface) -> dict:
    return {
        "a": surface.a,
        "b": surface.b,
        "f": to_string(surface.profile.f),
        "g": to_string(surface.profile.g),
        "y_domain": list(surface.y_domain),
        "x_domain": list(surface.x_domain),
    }
