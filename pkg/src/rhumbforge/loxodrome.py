"""Loxodrome direction fields on twisted surfaces.

A loxodrome cuts every meridian (``y`` constant) at a fixed angle ``phi`` or
every parallel (``x`` constant) at a fixed angle ``theta``. Squaring the
angle condition gives a quadratic in the slope; its two roots are selected
by :class:`Branch`::

    dy/dx = (-2 g11 g12 sin^2 phi  -/+ g11 R sin 2phi) / (2 (g12^2 - g11 g22 cos^2 phi))
    dx/dy = (-2 g12 g22 sin^2 th   -/+ g22 R sin 2th)  / (2 (g12^2 - g11 g22 cos^2 th))

with ``R = sqrt(g11 g22 - g12^2)``. ``Branch.MINUS`` takes the upper sign.
It is the branch used by all worked examples: on a surface of revolution it
gives ``dy/dx = +sqrt(g11/g22) tan(phi)``.

When written out in terms of ``a, b, f, g`` the meridian field carries an
extra overall sign, so ``MINUS`` here pairs with the ``+`` choice in that
expanded form; the parallel field pairs ``-`` with ``-``.

``R`` is multiplied by :meth:`ProfileCurve.orientation`, which flips sign
across points where the profile velocity reverses. This keeps the field
analytic through such points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import (DomainExit, IrregularPoint, NoBracket, SingularDenominator,
                     ValidationError)
from .surface import TwistedSurface

__all__ = [
    "Family", "Branch", "LoxodromeSpec",
    "meridian_slope", "parallel_slope", "slope", "cut_angle_cosine", "solve_course",
]

SINGULAR_RTOL = 1e-12


class Family(str, enum.Enum):
    """Which coordinate curves the loxodrome cuts at a constant angle.

    ``MERIDIAN`` curves are integrated as ``y(x)``, ``PARALLEL`` curves as
    ``x(y)``.
    """

    MERIDIAN = "meridian"
    PARALLEL = "parallel"


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> float:
        # MINUS selects the '-' in '-/+' above
        return -1.0 if self is Branch.MINUS else 1.0


def _check_angle(angle):
    angle = float(angle)
    if not 0.0 < angle < math.pi:
        raise ValidationError(f"angle must lie in (0, pi), got {angle!r}")
    return angle


@dataclass(frozen=True)
class LoxodromeSpec:
    """One curve request.

    ``start`` is the parameter pair ``(x0, y0)``. ``span`` is the interval of
    the independent variable (x for meridian loxodromes, y for parallel ones)
    and must contain the start's coordinate; the curve is traced from the
    start towards both ends. ``config`` is a
    :class:`rhumbforge.numerics.IntegratorConfig` or None for defaults.
    """

    family: Family
    angle: float
    start: tuple
    span: tuple
    branch: Branch = Branch.MINUS
    config: object = None

    def __post_init__(self):
        set_ = object.__setattr__
        try:
            set_(self, "family", Family(self.family))
            set_(self, "branch", Branch(self.branch))
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        set_(self, "angle", _check_angle(self.angle))
        try:
            x0, y0 = (float(t) for t in self.start)
            lo, hi = (float(t) for t in self.span)
        except (TypeError, ValueError):
            raise ValidationError("start and span must be pairs of numbers") from None
        if not lo <= hi:
            raise ValidationError(f"span must satisfy lo <= hi, got [{lo}, {hi}]")
        set_(self, "start", (x0, y0))
        set_(self, "span", (lo, hi))
        u0 = self.u0
        if not lo <= u0 <= hi:
            raise ValidationError(f"span [{lo}, {hi}] does not contain the start coordinate {u0}")

    @property
    def u0(self) -> float:
        return self.start[0] if self.family is Family.MERIDIAN else self.start[1]

    @property
    def v0(self) -> float:
        return self.start[1] if self.family is Family.MERIDIAN else self.start[0]

    def check_surface(self, surface: TwistedSurface):
        """Raise ValidationError unless start and span lie in the surface domains."""
        x0, y0 = self.start
        if not surface.contains(x0, y0):
            raise ValidationError(f"start ({x0}, {y0}) lies outside the surface domain")
        lo, hi = (surface.x_domain if self.family is Family.MERIDIAN else surface.y_domain)
        if self.span[0] < lo or self.span[1] > hi:
            raise ValidationError(f"span {list(self.span)} leaves the surface domain [{lo}, {hi}]")


def _oriented_root(surface, x, y, m):
    det = m.det
    if not det > 0.0:
        raise IrregularPoint(f"g11*g22 - g12^2 = {det:.3g} <= 0", (x, y))
    return surface.profile.orientation(y) * math.sqrt(det)


def _at_reversal(surface, y):
    # a few ulps: at the rounded reversal the profile speed is ~1e-16, not 0
    return any(abs(y - r) <= 1e-12 * max(1.0, abs(r)) for r in surface.profile.reversals)


def meridian_slope(surface: TwistedSurface, x: float, y: float, phi: float,
                   branch: Branch = Branch.MINUS) -> float:
    """dy/dx of the loxodrome cutting meridians at angle ``phi``."""
    phi = _check_angle(phi)
    m = surface.metric(x, y)
    if _at_reversal(surface, y):
        raise SingularDenominator("meridian field is unbounded at a profile reversal", (x, y))
    root = _oriented_root(surface, x, y, m)
    g11, g12, g22 = m
    sin_p, cos_p = math.sin(phi), math.cos(phi)
    den = 2.0 * (g12 * g12 - g11 * g22 * cos_p * cos_p)
    if not abs(den) > SINGULAR_RTOL * g11 * g22:
        raise SingularDenominator(
            f"denominator 2(g12^2 - g11 g22 cos^2 phi) = {den:.3g} vanishes", (x, y))
    num = -2.0 * g11 * g12 * sin_p * sin_p + Branch(branch).sign * g11 * root * 2.0 * sin_p * cos_p
    return num / den


def parallel_slope(surface: TwistedSurface, x: float, y: float, theta: float,
                   branch: Branch = Branch.MINUS) -> float:
    """dx/dy of the loxodrome cutting parallels at angle ``theta``."""
    theta = _check_angle(theta)
    m = surface.metric(x, y)
    if _at_reversal(surface, y):
        # numerator and denominator both carry the profile speed; the continued field is 0
        return 0.0
    root = _oriented_root(surface, x, y, m)
    g11, g12, g22 = m
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    den = 2.0 * (g12 * g12 - g11 * g22 * cos_t * cos_t)
    if not abs(den) > SINGULAR_RTOL * g11 * g22:
        raise SingularDenominator(
            f"denominator 2(g12^2 - g11 g22 cos^2 theta) = {den:.3g} vanishes", (x, y))
    num = -2.0 * g12 * g22 * sin_t * sin_t + Branch(branch).sign * g22 * root * 2.0 * sin_t * cos_t
    return num / den


def slope(surface, family, x, y, angle, branch=Branch.MINUS):
    if Family(family) is Family.MERIDIAN:
        return meridian_slope(surface, x, y, angle, branch)
    return parallel_slope(surface, x, y, angle, branch)


def cut_angle_cosine(surface: TwistedSurface, family, x: float, y: float, m: float) -> float:
    """Cosine of the angle between the curve direction and the reference curve.

    For the meridian family the direction is ``(dx, dy) = (1, m)`` and the
    reference tangent is ``T_x``; for the parallel family the direction is
    ``(m, 1)`` against ``T_y``.
    """
    g11, g12, g22 = surface.metric(x, y)
    if Family(family) is Family.MERIDIAN:
        return (g11 + g12 * m) / math.sqrt(g11 * (g11 + 2.0 * g12 * m + g22 * m * m))
    return (g12 * m + g22) / math.sqrt(g22 * (g11 * m * m + 2.0 * g12 * m + g22))


def solve_course(surface: TwistedSurface, family, start, span_end: float, target: float,
                 branch: Branch = Branch.MINUS, bracket=(0.05, 1.5), config=None,
                 tol: float = 1e-10) -> float:
    """Constant course angle whose loxodrome from ``start`` reaches ``target``.

    The loxodrome is integrated from ``start`` to ``span_end`` (in x for the
    meridian family, in y for the parallel one) and its final dependent
    coordinate is matched to ``target`` by bisection on the angle. The end
    value must be monotone in the angle on ``bracket``. A trial curve that
    leaves the surface domain counts as overshooting on that side.
    """
    from .numerics import integrate_loxodrome

    family = Family(family)
    lo, hi = (_check_angle(t) for t in bracket)
    if not lo < hi:
        raise ValidationError("bracket must satisfy lo < hi")
    x0, y0 = (float(t) for t in start)
    u0 = x0 if family is Family.MERIDIAN else y0
    if span_end == u0:
        return 0.5 * (lo + hi)
    span = (min(u0, span_end), max(u0, span_end))

    def miss(angle):
        spec = LoxodromeSpec(family, angle, (x0, y0), span, branch, config)
        try:
            curve = integrate_loxodrome(surface, spec, arc_length=False)
        except DomainExit as exc:
            # left through a domain edge before the span end: the end value lies beyond
            # that edge, so the edge itself carries the sign of the miss
            return exc.location[1 if family is Family.MERIDIAN else 0] - target
        end = curve.v[-1] if span_end > u0 else curve.v[0]
        return end - target

    f_lo, f_hi = miss(lo), miss(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NoBracket(f"end values at angles {lo} and {hi} lie on the same side of {target}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = miss(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
