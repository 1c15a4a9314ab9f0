"""Integration of loxodromes, arc length, and the incomplete elliptic integral."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import (DomainExit, EvaluationError, GeometryError, IntegrationError,
                     QuadratureError, SingularityHit, StepUnderflow, TooManySteps,
                     ValidationError)
from .loxodrome import Family, LoxodromeSpec, cut_angle_cosine, meridian_slope, parallel_slope
from .surface import TwistedSurface

__all__ = [
    "IntegratorConfig", "DenseSolution", "dormand_prince",
    "adaptive_simpson", "gauss_kronrod", "elliptic_E_incomplete",
    "Polyline", "make_polyline", "direction_field", "integrate_loxodrome", "coordinate_curve",
    "arc_length", "cumulative_arc_length", "max_angle_deviation",
]

SINGULAR_DET = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = 0.05
    min_step: float = 1e-12
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValidationError("integrator tolerances must be positive")
        if not 0 < self.min_step < self.max_step:
            raise ValidationError("integrator steps must satisfy 0 < min_step < max_step")
        if int(self.max_steps) < 1:
            raise ValidationError("max_steps must be positive")

    @classmethod
    def with_tol(cls, tol: float, **kw) -> "IntegratorConfig":
        return cls(abs_tol=tol, rel_tol=tol, **kw)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# fifth-order minus embedded fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# continuous extension: v(u0 + t h) = v0 + h * sum_i k_i * (P[i] . (t, t^2, t^3, t^4))
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)


class DenseSolution:
    """Piecewise quartic interpolant built from accepted Dormand-Prince steps."""

    def __init__(self):
        self._lo = []
        self._segments = []   # (u_start, h, v_start, q)

    def add(self, u_start, h, v_start, q):
        self._lo.append(min(u_start, u_start + h))
        self._segments.append((u_start, h, v_start, q))

    def extend(self, other: "DenseSolution"):
        for seg in other._segments:
            self.add(*seg)
        order = sorted(range(len(self._lo)), key=self._lo.__getitem__)
        self._lo = [self._lo[i] for i in order]
        self._segments = [self._segments[i] for i in order]

    def __len__(self):
        return len(self._segments)

    def __call__(self, u: float) -> float:
        i = bisect.bisect_right(self._lo, u) - 1
        i = min(max(i, 0), len(self._segments) - 1)
        u_start, h, v_start, q = self._segments[i]
        t = (u - u_start) / h
        return v_start + h * t * (q[0] + t * (q[1] + t * (q[2] + t * q[3])))


def _dense_coeffs(k):
    return tuple(sum(k[i] * _P[i][j] for i in range(7)) for j in range(4))


def dormand_prince(fun, u0, v0, u1, config=None, v_bounds=None, guard=None):
    """Integrate the scalar ODE ``v' = fun(u, v)`` from ``u0`` to ``u1``.

    Returns ``(us, vs, dense)``: the accepted step end points (including
    ``u0``) and a :class:`DenseSolution`. Steps never exceed
    ``config.max_step``. Step control is the standard proportional rule with
    safety factor 0.9 and exponent -1/5, growth clamped to [0.2, 5].

    ``v_bounds=(lo, hi)`` stops the integration with :class:`DomainExit` at
    the first crossing, located on the dense output. ``guard(u, v)`` is
    called at every accepted point and returns an error message when the
    solution has reached a singularity. Errors raised by ``fun`` in a trial
    step shrink the step; if that drives the step below ``min_step`` a
    :class:`SingularityHit` is raised. Every :class:`IntegrationError`
    carries ``partial = (us, vs, dense)`` for the completed part.
    """
    cfg = config or IntegratorConfig()
    direction = 1.0 if u1 >= u0 else -1.0
    us, vs = [float(u0)], [float(v0)]
    dense = DenseSolution()
    if u1 == u0:
        return us, vs, dense

    def fail(exc_type, message, u, v, cause=None):
        raise exc_type(message, location=(u, v), partial=(us, vs, dense)) from cause

    u, v = float(u0), float(v0)
    try:
        k1 = fun(u, v)
    except (GeometryError, EvaluationError) as exc:
        fail(SingularityHit, f"direction field undefined at the start: {exc}", u, v, exc)
    h = min(cfg.max_step, abs(u1 - u0))
    steps = 0
    last_cause = None     # error from the most recent rejected trial step
    while direction * (u1 - u) > 0.0:
        if steps >= cfg.max_steps:
            fail(TooManySteps, f"exceeded {cfg.max_steps} steps", u, v)
        steps += 1
        h = min(h, cfg.max_step)
        if h < cfg.min_step:
            if last_cause is not None:
                fail(SingularityHit, f"step size underflow near a singularity ({last_cause})",
                     u, v, last_cause)
            fail(StepUnderflow, f"step size fell below {cfg.min_step}", u, v)
        remaining = abs(u1 - u)
        final = h >= remaining * (1.0 - 1e-14)
        hs = direction * (remaining if final else h)
        k = [k1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        try:
            for i in range(1, 7):
                a = _A[i]
                vi = v + hs * sum(a[j] * k[j] for j in range(i))
                k[i] = fun(u + _C[i] * hs, vi)
        except (GeometryError, EvaluationError) as exc:
            last_cause = exc
            h = abs(hs) * 0.25
            continue
        v_new = v + hs * sum(_B[j] * k[j] for j in range(6))
        err_abs = abs(hs * sum(_E[j] * k[j] for j in range(7)))
        scale = cfg.abs_tol + cfg.rel_tol * max(abs(v), abs(v_new))
        err = err_abs / scale
        if not math.isfinite(err) or err > 1.0:
            factor = 0.2 if not math.isfinite(err) else max(0.2, 0.9 * err ** -0.2)
            h = abs(hs) * factor
            continue
        last_cause = None
        q = _dense_coeffs(k)
        u_new = u1 if final else u + hs

        if v_bounds is not None and not (v_bounds[0] <= v_new <= v_bounds[1]):
            bound = v_bounds[0] if v_new < v_bounds[0] else v_bounds[1]
            lo_t, hi_t = 0.0, 1.0
            for _ in range(200):
                mid = 0.5 * (lo_t + hi_t)
                vm = v + hs * mid * (q[0] + mid * (q[1] + mid * (q[2] + mid * q[3])))
                if (vm - bound) * (v - bound) > 0.0:
                    lo_t = mid
                else:
                    hi_t = mid
                if hi_t - lo_t < 1e-15:
                    break
            t_exit = lo_t
            if t_exit > 0.0:
                dense.add(u, hs, v, q)
                u_exit = u + t_exit * hs
                v_exit = v + hs * t_exit * (q[0] + t_exit * (q[1] + t_exit * (q[2] + t_exit * q[3])))
                us.append(u_exit)
                vs.append(v_exit)
            fail(DomainExit, f"solution left the domain [{v_bounds[0]:.6g}, {v_bounds[1]:.6g}]",
                 us[-1], vs[-1])

        dense.add(u, hs, v, q)
        u, v, k1 = u_new, v_new, k[6]
        us.append(u)
        vs.append(v)
        if guard is not None:
            message = guard(u, v)
            if message:
                fail(SingularityHit, message, u, v)
        growth = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h = abs(hs) * growth
    return us, vs, dense


# ---------------------------------------------------------------------------
# quadrature

def adaptive_simpson(fun: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 50, rtol: float = 0.0) -> float:
    """Adaptive Simpson rule with Richardson correction.

    A panel is accepted when its error estimate is below ``tol`` (halved at
    each split) or below ``rtol`` times the panel's own integral.
    """
    if a == b:
        return 0.0
    fa, fm, fb = fun(a), fun(0.5 * (a + b)), fun(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, s0, tol0, depth = stack.pop()
        m = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m), 0.5 * (m + b0)
        flm, frm = fun(lm), fun(rm)
        left = (m - a0) / 6.0 * (fa0 + 4.0 * flm + fm0)
        right = (b0 - m) / 6.0 * (fm0 + 4.0 * frm + fb0)
        delta = left + right - s0
        if abs(delta) <= 15.0 * max(tol0, rtol * abs(left + right)):
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            raise QuadratureError(f"adaptive Simpson did not converge on [{a0}, {b0}]")
        else:
            stack.append((a0, m, fa0, flm, fm0, left, 0.5 * tol0, depth + 1))
            stack.append((m, b0, fm0, frm, fb0, right, 0.5 * tol0, depth + 1))
    return total


_XGK = (0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0)
_WGK = (0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714)
# 7-point Gauss weights at _XGK[1], _XGK[3], _XGK[5], _XGK[7]
_WG = (0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
       0.381830050505118944950369775488975, 0.417959183673469387755102040816327)


def _gk15(fun, a, b):
    c, r = 0.5 * (a + b), 0.5 * (b - a)
    fc = fun(c)
    kron = _WGK[7] * fc
    gauss = _WG[3] * fc
    for i in range(7):
        dx = r * _XGK[i]
        pair = fun(c - dx) + fun(c + dx)
        kron += _WGK[i] * pair
        if i % 2 == 1:
            gauss += _WG[i // 2] * pair
    return kron * r, abs((kron - gauss) * r)


def gauss_kronrod(fun: Callable[[float], float], a: float, b: float,
                  tol: float = 1e-12, max_intervals: int = 2000) -> float:
    """Globally adaptive 7/15-point Gauss-Kronrod quadrature."""
    if a == b:
        return 0.0
    value, err = _gk15(fun, a, b)
    intervals = [(err, a, b, value)]
    total, total_err = value, err
    while total_err > tol:
        if len(intervals) >= max_intervals:
            raise QuadratureError(f"Gauss-Kronrod did not reach {tol:g} on [{a}, {b}]")
        intervals.sort(key=lambda t: t[0])
        e0, a0, b0, v0 = intervals.pop()
        m = 0.5 * (a0 + b0)
        v1, e1 = _gk15(fun, a0, m)
        v2, e2 = _gk15(fun, m, b0)
        intervals += [(e1, a0, m, v1), (e2, m, b0, v2)]
        total += v1 + v2 - v0
        total_err += e1 + e2 - e0
    return math.fsum(t[3] for t in intervals)


def elliptic_E_incomplete(phi: float, m: float) -> float:
    """Incomplete elliptic integral of the second kind, ``int_0^phi sqrt(1 - m sin^2 t) dt``.

    Amplitude/parameter convention, as in ``EllipticE[phi, m]`` of computer
    algebra systems. Accurate to about 1e-12 absolute.
    """
    phi, m = float(phi), float(m)
    reach = 1.0 if abs(phi) >= 0.5 * math.pi else math.sin(phi) ** 2
    if m * reach > 1.0:
        raise EvaluationError(f"E(phi|m) needs m sin^2 t <= 1 on [0, phi]; got phi={phi}, m={m}")
    if phi == 0.0:
        return 0.0

    def integrand(t):
        return math.sqrt(max(0.0, 1.0 - m * math.sin(t) ** 2))

    # split at multiples of pi/2, where the integrand has kinks when m = 1
    sign = 1.0 if phi > 0 else -1.0
    stop = abs(phi)
    knots = [0.0]
    q = 0.5 * math.pi
    while knots[-1] + q < stop:
        knots.append(knots[-1] + q)
    knots.append(stop)
    parts = [gauss_kronrod(integrand, lo, hi, tol=1e-13) for lo, hi in zip(knots, knots[1:])]
    return sign * math.fsum(parts)


# ---------------------------------------------------------------------------
# curves

@dataclass
class Polyline:
    """Sampled curve on a surface.

    ``u`` is the independent parameter (x for the meridian family, y for the
    parallel family) and ``v`` the dependent one. ``points`` holds the 3-D
    positions and ``s`` the cumulative arc length from the first sample.
    ``slope(u, v)`` is the direction field the curve follows and ``path(u)``
    a continuous interpolant of ``v``; either may be None.
    """

    family: Family
    u: np.ndarray
    v: np.ndarray
    points: np.ndarray
    s: np.ndarray
    slope: Optional[Callable[[float, float], float]] = field(default=None, repr=False)
    path: Optional[Callable[[float], float]] = field(default=None, repr=False)

    def __len__(self):
        return len(self.u)

    @property
    def x(self) -> np.ndarray:
        return self.u if self.family is Family.MERIDIAN else self.v

    @property
    def y(self) -> np.ndarray:
        return self.v if self.family is Family.MERIDIAN else self.u

    @property
    def length(self) -> float:
        return float(self.s[-1])


def _xy(family, u, v):
    return (u, v) if family is Family.MERIDIAN else (v, u)


def _speed_fn(surface, family, path, slope):
    """ds/du along the curve ``v = path(u)`` with ``dv/du = slope(u, v)``."""
    meridian = family is Family.MERIDIAN

    def speed(u):
        v = path(u)
        dv = slope(u, v)
        x, y = (u, v) if meridian else (v, u)
        g11, g12, g22 = surface.metric(x, y)
        if meridian:
            q = g11 + 2.0 * g12 * dv + g22 * dv * dv
        else:
            q = g11 * dv * dv + 2.0 * g12 * dv + g22
        return math.sqrt(max(q, 0.0))

    return speed


def _curve_functions(curve):
    path, slope = curve.path, curve.slope
    u, v = np.asarray(curve.u, float), np.asarray(curve.v, float)
    if path is None:
        if slope is not None and len(u) >= 2:
            dv = np.array([slope(a, b) for a, b in zip(u, v)])
            spline = CubicHermiteSpline(u, v, dv)
        elif len(u) >= 2:
            spline = CubicSpline(u, v)
        else:
            return None, None
        path = lambda t: float(spline(t))
        if slope is None:
            deriv = spline.derivative()
            slope = lambda t, _v: float(deriv(t))
    elif slope is None:
        spline = CubicSpline(u, v)
        deriv = spline.derivative()
        slope = lambda t, _v: float(deriv(t))
    return path, slope


def cumulative_arc_length(surface: TwistedSurface, curve: Polyline,
                          tol: float = 1e-10) -> np.ndarray:
    """Cumulative arc length at each sample, by adaptive Simpson per segment.

    The integrand is ``sqrt(g11 + 2 g12 v' + g22 v'^2)`` (meridian family;
    ``g11 v'^2 + 2 g12 v' + g22`` for the parallel family), with ``v'``
    taken from the curve's direction field rather than from the samples.
    """
    u = np.asarray(curve.u, float)
    out = np.zeros(len(u))
    if len(u) < 2:
        return out
    path, slope = _curve_functions(curve)
    speed = _speed_fn(surface, curve.family, path, slope)
    total = abs(u[-1] - u[0])
    acc = 0.0
    for i in range(1, len(u)):
        seg_tol = tol * abs(u[i] - u[i - 1]) / total if total > 0 else tol
        acc += adaptive_simpson(speed, float(u[i - 1]), float(u[i]), max(seg_tol, 1e-15),
                                rtol=1e-12)
        out[i] = acc
    return out


def arc_length(surface: TwistedSurface, curve: Polyline, tol: float = 1e-10) -> float:
    """Length of ``curve`` on ``surface``, from the first fundamental form."""
    return float(cumulative_arc_length(surface, curve, tol)[-1])


def make_polyline(surface, family, u, v, slope=None, path=None, tol=1e-10,
                  arc_length=True) -> Polyline:
    """Assemble a Polyline; ``s`` is NaN-filled when ``arc_length`` is False."""
    family = Family(family)
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    points = np.array([surface.point(*_xy(family, a, b)) for a, b in zip(u, v)]).reshape(-1, 3)
    curve = Polyline(family, u, v, points, np.full(len(u), np.nan), slope, path)
    if arc_length:
        curve.s = cumulative_arc_length(surface, curve, tol)
    return curve


def direction_field(surface: TwistedSurface, spec: LoxodromeSpec):
    """``(u, v) -> dv/du`` for the curve family, angle and branch of ``spec``."""
    angle, branch = spec.angle, spec.branch
    if spec.family is Family.MERIDIAN:
        return lambda u, v: meridian_slope(surface, u, v, angle, branch)
    return lambda u, v: parallel_slope(surface, v, u, angle, branch)


def _guard(surface, family):
    def guard(u, v):
        x, y = _xy(family, u, v)
        m = surface.metric(x, y)
        # det / g22: stays positive through profile reversals, vanishes where T_x degenerates
        reduced = m.det / m.g22 if m.g22 > 0.0 else m.g11
        if reduced < SINGULAR_DET:
            return f"surface degenerates (g11 - g12^2/g22 = {reduced:.3g})"
        return None

    return guard


def integrate_loxodrome(surface: TwistedSurface, spec: LoxodromeSpec,
                        arc_length: bool = True) -> Polyline:
    """Trace the loxodrome described by ``spec`` across its span.

    Integration runs from the start towards both ends of the span. On
    failure an :class:`IntegrationError` subclass is raised whose
    ``partial`` attribute holds the traced part as a :class:`Polyline`.
    With ``arc_length=False`` the cumulative length is not computed.
    """
    spec.check_surface(surface)
    cfg = spec.config or IntegratorConfig()
    family = spec.family
    fun = direction_field(surface, spec)
    bounds = surface.y_domain if family is Family.MERIDIAN else surface.x_domain
    guard = _guard(surface, family)
    u0, v0 = spec.u0, spec.v0
    lo, hi = spec.span

    pieces = []
    failure = None
    for end in (hi, lo):
        try:
            pieces.append(dormand_prince(fun, u0, v0, end, cfg, bounds, guard))
        except IntegrationError as exc:
            pieces.append(exc.partial)
            failure = exc
            break

    dense = DenseSolution()
    us, vs = list(pieces[0][0]), list(pieces[0][1])
    dense.extend(pieces[0][2])
    if len(pieces) > 1:
        back_u, back_v, back_dense = pieces[1]
        us = back_u[:0:-1] + us
        vs = back_v[:0:-1] + vs
        dense.extend(back_dense)
    path = dense if len(dense) else None
    curve = make_polyline(surface, family, us, vs, slope=fun, path=path, arc_length=arc_length)
    if failure is not None:
        failure.partial = curve
        raise failure
    return curve


def coordinate_curve(surface: TwistedSurface, family, fixed: float, span, n: int = 257) -> Polyline:
    """A meridian (``family='meridian'``, y = fixed) or parallel (x = fixed)."""
    family = Family(family)
    u = np.linspace(float(span[0]), float(span[1]), int(n))
    v = np.full_like(u, float(fixed))
    return make_polyline(surface, family, u, v, slope=lambda a, b: 0.0, path=lambda a: float(fixed))


def max_angle_deviation(surface: TwistedSurface, curve: Polyline, angle: float) -> float:
    """Largest deviation of the cut angle's cosine from ``cos(angle)`` along the curve.

    The direction ``(1, v')`` follows increasing ``u``; a loxodrome traversed
    the other way cuts at the supplementary angle, so the orientation is
    fixed once from the first sample and then held for the whole curve.
    Samples where the reference tangent vanishes (profile reversals) carry
    no angle and are skipped.
    """
    if curve.slope is None:
        raise ValidationError("angle deviation needs the curve's direction field")
    target = math.cos(angle)
    orientation = None
    worst = 0.0
    for u, v in zip(curve.u, curve.v):
        x, y = _xy(curve.family, float(u), float(v))
        m = surface.metric(x, y)
        ref = m.g11 if curve.family is Family.MERIDIAN else m.g22
        if ref <= 1e-16 * (m.g11 + m.g22):
            continue
        c = cut_angle_cosine(surface, curve.family, x, y, curve.slope(float(u), float(v)))
        if orientation is None:
            orientation = 1.0 if abs(c - target) <= abs(c + target) else -1.0
        worst = max(worst, abs(orientation * c - target))
    return worst
