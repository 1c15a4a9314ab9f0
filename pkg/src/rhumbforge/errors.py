"""Exception hierarchy shared by every module of the package."""


class RhumbforgeError(Exception):
    """Base class for all package errors."""


class ValidationError(RhumbforgeError, ValueError):
    """Invalid user input: bad domains, angles, resolutions, records."""


class ExprSyntaxError(ValidationError):
    """Malformed expression text. ``position`` is the 0-based column."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EvaluationError(RhumbforgeError, ArithmeticError):
    """Expression evaluated outside its domain or to a non-finite value."""


class GeometryError(RhumbforgeError):
    """A geometric quantity is undefined at the requested point."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} at (x, y) = ({location[0]:.12g}, {location[1]:.12g})"
        super().__init__(message)


class IrregularPoint(GeometryError):
    """g11*g22 - g12**2 <= 0: tangent vectors are linearly dependent."""


class SingularDenominator(GeometryError):
    """The loxodrome direction field has a vanishing denominator."""


class IntegrationError(RhumbforgeError):
    """Integration stopped before the end of the span.

    ``partial`` holds the curve traced up to the failure (may be None) and
    ``location`` the (x, y) parameter pair where it stopped.
    """

    def __init__(self, message, location=None, partial=None):
        self.location = location
        self.partial = partial
        if location is not None:
            message = f"{message} at (x, y) = ({location[0]:.12g}, {location[1]:.12g})"
        super().__init__(message)


class StepUnderflow(IntegrationError):
    pass


class TooManySteps(IntegrationError):
    pass


class SingularityHit(IntegrationError):
    pass


class DomainExit(IntegrationError):
    pass


class NoBracket(RhumbforgeError):
    """Course-solver bracket does not straddle the target."""


class QuadratureError(RhumbforgeError):
    """Adaptive quadrature failed to reach its tolerance."""
