"""Loxodromes on twisted surfaces in Euclidean 3-space.

Build a surface from a profile curve given as text, trace curves that cut
its meridians or parallels at a constant angle, and measure them::

    from rhumbforge import ProfileCurve, TwistedSurface, LoxodromeSpec, integrate_loxodrome

    surface = TwistedSurface(a=1.0, b=0.0,
                             profile=ProfileCurve("cos(y)", "sin(y)", (-3, 3)))
    spec = LoxodromeSpec("meridian", angle=0.785398, start=(0, 0), span=(-3.14, 3.14))
    curve = integrate_loxodrome(surface, spec)
    curve.length
"""

from .errors import (DomainExit, EvaluationError, ExprSyntaxError, GeometryError, IntegrationError,
                     IrregularPoint, NoBracket, QuadratureError, RhumbforgeError,
                     SingularDenominator, SingularityHit, StepUnderflow, TooManySteps,
                     ValidationError)
from .expr import differentiate, evaluate, parse_expression, to_string
from .loxodrome import (Branch, Family, LoxodromeSpec, cut_angle_cosine, meridian_slope,
                        parallel_slope, solve_course)
from .numerics import (IntegratorConfig, Polyline, arc_length, coordinate_curve,
                       elliptic_E_incomplete, integrate_loxodrome, max_angle_deviation)
from .oracle import embed_loxodrome, example_fixture
from .surface import (MetricCoeffs, ProfileCurve, TwistedSurface, angle_between, eval_partials,
                      eval_point, inner, metric, norm)

__version__ = "0.1.0"
