"""Exception types shared across the package.

Validation errors are named after the invariant they report so that callers
(and the CLI) can surface the violated condition by class name alone.
"""


class CurvtriError(Exception):
    """Base class for all package errors."""


class InvalidInput(CurvtriError):
    """An argument lies outside the documented domain of an operation."""


class TriangleValidationError(CurvtriError):
    """Base class for side-length validation failures."""


class NonPositiveSide(TriangleValidationError):
    pass


class TriangleInequalityViolated(TriangleValidationError):
    pass


class SphericalDomainViolated(TriangleValidationError):
    """Side >= pi, perimeter >= 2*pi, or circumradius >= pi/2."""


class SideLengthCapExceeded(TriangleValidationError):
    """A hyperbolic side exceeds the configured overflow cap."""


class DegenerateTriangle(TriangleValidationError):
    """Coincident or collinear vertices."""


class ConditioningError(CurvtriError):
    """A numeric solve is too ill-conditioned to trust."""


class NoCircumcircle(ConditioningError):
    """The hyperbolic triangle has no circumscribed circle (ideal or
    ultra-ideal circumcenter)."""


class ProjectionDomainError(CurvtriError):
    """A vertex lies at angle >= pi/2 from the projection pole."""


class HemisphereViolation(CurvtriError):
    """A spherical simplex is not contained in an open hemisphere with
    circumradius < pi/2."""


class RejectionBudgetExceeded(CurvtriError):
    """The rejection sampler failed to produce a valid sample in time."""


class EvaluationError(CurvtriError):
    """An inequality evaluator produced non-finite values."""


class TheoremPreconditionError(CurvtriError):
    """The monotonicity class of a pair does not allow the requested
    transport geometry."""


class RegistrationError(CurvtriError):
    """A registered inequality failed its self-checks."""
