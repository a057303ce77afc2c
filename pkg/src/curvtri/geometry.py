"""Closed-form metric quantities for triangles on surfaces of constant
curvature K in {0, +1, -1}.

Lengths are geodesic throughout: radians of arc on the unit sphere,
hyperbolic-metric lengths in the Klein disk, plain Euclidean lengths in the
plane.  The half-side transform ``s`` (x/2, sin(x/2), sinh(x/2)) drives every
unified formula; the circumradius and inradius come out wrapped in the
geometry's radius functional (identity, tan, tanh).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTriangle,
    InvalidInput,
    NonPositiveSide,
    SideLengthCapExceeded,
    SphericalDomainViolated,
    TriangleInequalityViolated,
)

# Default cap on hyperbolic side lengths; sinh overflows far later, but
# conditioning of the radius formulas degrades well before that.
HYPERBOLIC_SIDE_CAP = 20.0

# Triangles missing the strict triangle inequality by less than this
# (relative to the largest side) are rejected, not repaired.
DEGENERACY_MARGIN = 1e-14


class Geometry(enum.Enum):
    """Curvature tag selecting every formula branch."""

    EUCLIDEAN = 0
    SPHERICAL = 1
    HYPERBOLIC = -1

    @property
    def curvature(self) -> int:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "Geometry":
        try:
            return cls[name.upper()]
        except KeyError:
            raise InvalidInput(f"unknown geometry {name!r}") from None


@dataclass(frozen=True)
class Triangle:
    """A validated side-length triple bound to a geometry.

    Build instances through :func:`validate_triangle`; direct construction
    skips the invariants.
    """

    kind: Geometry
    a: float
    b: float
    c: float

    @property
    def sides(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    @property
    def side_spread(self) -> float:
        return max(self.sides) - min(self.sides)


@dataclass(frozen=True)
class RadiusFunctional:
    """Holds rho(R): R itself (Euclidean), tan R (spherical), tanh R
    (hyperbolic)."""

    kind: Geometry
    value: float


@dataclass(frozen=True)
class JPair:
    """The two square-root slack products of a triangle.

    ``j`` applies the half-side transform to the triangle-inequality slacks;
    ``jbar`` forms the slacks of the transformed sides.  Their ordering flips
    between spherical and hyperbolic geometry.
    """

    j: float
    jbar: float


def s_func(kind: Geometry, x):
    """Half-side transform: x/2, sin(x/2) or sinh(x/2) by geometry.

    Accepts scalars or numpy arrays.  Raises :class:`InvalidInput` for
    negative arguments, or spherical arguments beyond 2*pi.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise InvalidInput("s-function argument must be nonnegative")
    if kind is Geometry.SPHERICAL and np.any(arr > 2 * math.pi + 1e-12):
        raise InvalidInput("spherical s-function argument must be <= 2*pi")
    out = _s(kind, arr)
    return float(out) if np.isscalar(x) else out


def _s(kind: Geometry, x):
    """Unchecked, array-friendly half-side transform."""
    if kind is Geometry.EUCLIDEAN:
        return np.asarray(x, dtype=float) / 2.0
    if kind is Geometry.SPHERICAL:
        return np.sin(np.asarray(x, dtype=float) / 2.0)
    return np.sinh(np.asarray(x, dtype=float) / 2.0)


def spherical_circumradius_from_sides(a, b, c):
    """True geodesic circumradius of a spherical triangle, in (0, pi).

    Uses the angle-based closed form tan R = tan(a/2) / cos(S - A) with
    S = (A + B + C)/2, which stays unambiguous across the R = pi/2 boundary
    (unlike the unified radius formula, which assumes R < pi/2).
    Array-friendly; inputs must already satisfy the triangle inequality.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    sin_a, sin_b, sin_c = np.sin(a), np.sin(b), np.sin(c)
    cos_a, cos_b, cos_c = np.cos(a), np.cos(b), np.cos(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        ang_a = np.arccos(np.clip((cos_a - cos_b * cos_c) / (sin_b * sin_c), -1.0, 1.0))
        ang_b = np.arccos(np.clip((cos_b - cos_a * cos_c) / (sin_a * sin_c), -1.0, 1.0))
        ang_c = np.arccos(np.clip((cos_c - cos_a * cos_b) / (sin_a * sin_b), -1.0, 1.0))
        half_sum = (ang_a + ang_b + ang_c) / 2.0
        t = np.tan(a / 2.0) / np.cos(half_sum - ang_a)
    radius = np.where(t > 0, np.arctan(t), np.arctan(t) + math.pi)
    return radius if radius.ndim else float(radius)


def valid_sides_mask(kind: Geometry, a, b, c, side_cap: float = HYPERBOLIC_SIDE_CAP):
    """Vectorized validity test mirroring :func:`validate_triangle`."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    ok = (a > 0) & (b > 0) & (c > 0)
    margin = DEGENERACY_MARGIN * np.maximum(np.maximum(a, b), np.maximum(c, 1.0))
    ok &= (a + b - c > margin) & (a + c - b > margin) & (b + c - a > margin)
    if kind is Geometry.SPHERICAL:
        ok &= (a < math.pi) & (b < math.pi) & (c < math.pi)
        ok &= a + b + c < 2 * math.pi
        safe_a = np.where(ok, a, 1.0)
        safe_b = np.where(ok, b, 1.0)
        safe_c = np.where(ok, c, 1.0)
        ok &= spherical_circumradius_from_sides(safe_a, safe_b, safe_c) < math.pi / 2
    elif kind is Geometry.HYPERBOLIC:
        ok &= (a <= side_cap) & (b <= side_cap) & (c <= side_cap)
    return ok


def validate_triangle(
    kind: Geometry, a: float, b: float, c: float, side_cap: float = HYPERBOLIC_SIDE_CAP
) -> Triangle:
    """Validate a side-length triple, returning a :class:`Triangle`.

    Raises the specific validation error naming the violated invariant.
    """
    a, b, c = float(a), float(b), float(c)
    if not (a > 0 and b > 0 and c > 0):
        raise NonPositiveSide(f"sides must be positive, got ({a}, {b}, {c})")
    if kind is Geometry.SPHERICAL:
        if max(a, b, c) >= math.pi:
            raise SphericalDomainViolated(f"spherical side >= pi in ({a}, {b}, {c})")
        if a + b + c >= 2 * math.pi:
            raise SphericalDomainViolated(f"spherical perimeter >= 2*pi: {a + b + c}")
    elif kind is Geometry.HYPERBOLIC:
        if max(a, b, c) > side_cap:
            raise SideLengthCapExceeded(
                f"hyperbolic side exceeds cap {side_cap}: ({a}, {b}, {c})"
            )
    margin = DEGENERACY_MARGIN * max(a, b, c, 1.0)
    if a + b - c <= margin or a + c - b <= margin or b + c - a <= margin:
        raise TriangleInequalityViolated(
            f"sides ({a}, {b}, {c}) fail the strict triangle inequality"
        )
    if kind is Geometry.SPHERICAL:
        radius = spherical_circumradius_from_sides(a, b, c)
        if radius >= math.pi / 2:
            raise SphericalDomainViolated(
                f"spherical circumradius {radius:.6f} >= pi/2 (hemisphere restriction)"
            )
    return Triangle(kind, a, b, c)


def euclidean_shadow(t: Triangle) -> Triangle:
    """The Euclidean triangle with sides s(a), s(b), s(c).

    Exists for every Euclidean and spherical triangle.  For hyperbolic
    triangles it exists exactly when the triangle has a circumscribed circle
    (the convexity of sinh can break the triangle inequality of the
    transformed sides otherwise); in that case the validation here raises
    :class:`TriangleInequalityViolated`.
    """
    sa, sb, sc = (float(_s(t.kind, x)) for x in t.sides)
    return validate_triangle(Geometry.EUCLIDEAN, sa, sb, sc)


def radius_functionals_arrays(kind: Geometry, a, b, c):
    """(rho(R), rho(r)) for arrays of side triples; no validation.

    rho is the geometry's radius functional: identity, tan, or tanh.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    sa, sb, sc = _s(kind, a), _s(kind, b), _s(kind, c)
    j_sq = _s(kind, a + b - c) * _s(kind, a + c - b) * _s(kind, b + c - a)
    s_per = _s(kind, a + b + c)
    rho_big = 2.0 * sa * sb * sc / np.sqrt(j_sq * s_per)
    rho_small = np.sqrt(j_sq / s_per)
    return rho_big, rho_small


def circumradius_functional(t: Triangle) -> RadiusFunctional:
    """rho(R) = 2 s(a)s(b)s(c) / sqrt(s(a+b-c) s(a+c-b) s(b+c-a) s(a+b+c))."""
    value, _ = radius_functionals_arrays(t.kind, *t.sides)
    return RadiusFunctional(t.kind, float(value))


def inradius_functional(t: Triangle) -> RadiusFunctional:
    """rho(r) = sqrt(s(a+b-c) s(a+c-b) s(b+c-a) / s(a+b+c))."""
    _, value = radius_functionals_arrays(t.kind, *t.sides)
    return RadiusFunctional(t.kind, float(value))


def radius_from_functional(kind: Geometry, v: float) -> float:
    """Invert the radius functional to a true geodesic radius."""
    v = float(v)
    if v <= 0:
        raise InvalidInput(f"radius functional must be positive, got {v}")
    if kind is Geometry.EUCLIDEAN:
        return v
    if kind is Geometry.SPHERICAL:
        return math.atan(v)
    if v >= 1.0:
        raise InvalidInput(
            f"hyperbolic radius functional must be < 1, got {v} (no real radius)"
        )
    return math.atanh(v)


def j_invariants_arrays(kind: Geometry, a, b, c):
    """(J, Jbar) for arrays of side triples; no validation.

    Jbar is NaN for hyperbolic triangles whose transformed sides fail the
    Euclidean triangle inequality (equivalently, triangles without a
    circumscribed circle); its square is negative there, so the hyperbolic
    ordering Jbar <= J still holds in squared form.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    j = np.sqrt(_s(kind, a + b - c) * _s(kind, a + c - b) * _s(kind, b + c - a))
    sa, sb, sc = _s(kind, a), _s(kind, b), _s(kind, c)
    with np.errstate(invalid="ignore"):
        jbar = np.sqrt((sa + sb - sc) * (sa + sc - sb) * (sb + sc - sa))
    return j, jbar


def j_invariants(t: Triangle) -> JPair:
    j, jbar = j_invariants_arrays(t.kind, *t.sides)
    return JPair(float(j), float(jbar))


# --- Klein disk -------------------------------------------------------------


def _check_klein_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise InvalidInput(f"Klein point must be a 2-vector, got shape {p.shape}")
    if p @ p >= 1.0:
        raise InvalidInput(f"Klein point {p.tolist()} lies on or outside the unit disk")
    return p


def klein_distance(p, q) -> float:
    """Hyperbolic distance between two points of the open unit (Klein) disk.

    Evaluates the chord cross-ratio logarithm through its inner-product
    form cosh d = (1 - p.q) / sqrt((1 - |p|^2)(1 - |q|^2)), which is robust
    for near-diameter chords; the explicit boundary-point construction is
    kept as a test oracle in the oracle module.
    """
    p = _check_klein_point(p)
    q = _check_klein_point(q)
    num = 1.0 - p @ q
    den = math.sqrt((1.0 - p @ p) * (1.0 - q @ q))
    return math.acosh(max(1.0, num / den))


def klein_distance_arrays(p, q):
    """Vectorized :func:`klein_distance` over (..., 2) arrays; no checks."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    num = 1.0 - np.sum(p * q, axis=-1)
    den = np.sqrt((1.0 - np.sum(p * p, axis=-1)) * (1.0 - np.sum(q * q, axis=-1)))
    return np.arccosh(np.maximum(1.0, num / den))


# --- Triangles from vertices ------------------------------------------------


def _pairwise_distances(kind: Geometry, v1, v2, v3):
    if kind is Geometry.EUCLIDEAN:
        v1, v2, v3 = (np.asarray(v, dtype=float) for v in (v1, v2, v3))
        return (
            float(np.linalg.norm(v2 - v3)),
            float(np.linalg.norm(v1 - v3)),
            float(np.linalg.norm(v1 - v2)),
        )
    if kind is Geometry.SPHERICAL:
        vs = [np.asarray(v, dtype=float) for v in (v1, v2, v3)]
        for v in vs:
            if abs(v @ v - 1.0) > 1e-9:
                raise InvalidInput("spherical vertices must be unit 3-vectors")
        arc = lambda u, w: float(np.arccos(np.clip(u @ w, -1.0, 1.0)))
        return (arc(vs[1], vs[2]), arc(vs[0], vs[2]), arc(vs[0], vs[1]))
    return (
        klein_distance(v2, v3),
        klein_distance(v1, v3),
        klein_distance(v1, v2),
    )


def side_lengths_from_vertices(kind: Geometry, v1, v2, v3) -> Triangle:
    """Triangle whose sides are the pairwise geodesic distances of three
    model points (unit 3-vectors, Klein 2-vectors, or plane 2-vectors)."""
    a, b, c = _pairwise_distances(kind, v1, v2, v3)
    try:
        return validate_triangle(kind, a, b, c)
    except (NonPositiveSide, TriangleInequalityViolated) as exc:
        raise DegenerateTriangle(
            f"vertices are coincident or collinear (sides {a}, {b}, {c})"
        ) from exc
