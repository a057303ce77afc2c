"""Triangle and simplex inequalities on surfaces of constant curvature,
with vertex-based oracles and randomized verification."""

from .errors import (
    ConditioningError,
    CurvtriError,
    DegenerateTriangle,
    HemisphereViolation,
    InvalidInput,
    NoCircumcircle,
    NonPositiveSide,
    ProjectionDomainError,
    RejectionBudgetExceeded,
    SideLengthCapExceeded,
    SphericalDomainViolated,
    TheoremPreconditionError,
    TriangleInequalityViolated,
    TriangleValidationError,
)
from .geometry import (
    Geometry,
    JPair,
    RadiusFunctional,
    Triangle,
    circumradius_functional,
    euclidean_shadow,
    inradius_functional,
    j_invariants,
    klein_distance,
    radius_from_functional,
    s_func,
    side_lengths_from_vertices,
    spherical_circumradius_from_sides,
    validate_triangle,
)
from .inequalities import (
    ChainInequality,
    CounterexampleRecord,
    HomogeneousPair,
    InequalityEvaluation,
    Monotonicity,
    RawInequality,
    classify_monotonicity,
    evaluate_chain,
    evaluate_on_triangle,
    generalize,
    registry_builtin,
    search_counterexample,
    verify_inequality,
)
from .oracle import (
    EmbeddedTriangle,
    SamplerConfig,
    circumcenter_oracle,
    incenter_oracle,
    sample_triangle,
    tangent_projection,
)
from .simplex import (
    EuclideanSimplex,
    SphericalSimplex,
    cayley_menger_volume,
    euclidean_circumsphere,
    euclidean_insphere,
    gnomonic_project,
    orthant_simplex,
    regular_euclidean_simplex,
    spherical_circumsphere,
    spherical_insphere,
    transfer_check,
    verify_simplex_euler,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
