"""n-dimensional circumsphere/insphere solvers and the spherical transfer
of edge-length inequalities.

Euclidean simplices live in R^n as n+1 affinely independent vertices;
spherical simplices are n+1 unit vectors in R^(n+1) contained in an open
hemisphere with circumradius below pi/2, so the central projection onto the
tangent hyperplane at the circumcenter exists.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConditioningError,
    HemisphereViolation,
    InvalidInput,
    ProjectionDomainError,
    RejectionBudgetExceeded,
)
from .geometry import Geometry, _s
from .inequalities import HOLDS_FLOOR, normalized_gap
from .oracle import rotation_to_pole

# Affine-independence floor, relative to max edge length to the n-th power.
VOLUME_FLOOR = 1e-12

EQUIDISTANCE_TOL = 1e-9


def cayley_menger_volume(points) -> float:
    """k-volume of the simplex spanned by k+1 points, via the bordered
    determinant of squared pairwise distances."""
    points = np.asarray(points, dtype=float)
    m = points.shape[0]
    k = m - 1
    diff = points[:, None, :] - points[None, :, :]
    sq = np.sum(diff * diff, axis=-1)
    border = np.ones((m + 1, m + 1))
    border[0, 0] = 0.0
    border[1:, 1:] = sq
    det = np.linalg.det(border)
    factor = ((-1.0) ** (k + 1)) / (2.0**k * math.factorial(k) ** 2)
    return math.sqrt(max(0.0, factor * det))


@dataclass(frozen=True)
class EuclideanSimplex:
    """n+1 affinely independent vertices in n-space."""

    vertices: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    @property
    def edge_lengths(self) -> np.ndarray:
        v = self.vertices
        iu = np.triu_indices(len(v), k=1)
        diff = v[iu[0]] - v[iu[1]]
        return np.linalg.norm(diff, axis=-1)

    @classmethod
    def from_vertices(cls, vertices) -> "EuclideanSimplex":
        vertices = np.asarray(vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[0] != vertices.shape[1] + 1:
            raise InvalidInput(
                f"need n+1 vertices in n-space, got shape {vertices.shape}"
            )
        if vertices.shape[1] < 2:
            raise InvalidInput("dimension must be >= 2")
        simplex = cls(vertices)
        scale = float(np.max(simplex.edge_lengths))
        if cayley_menger_volume(vertices) <= VOLUME_FLOOR * scale ** vertices.shape[1]:
            raise ConditioningError("vertices are (nearly) affinely dependent")
        return simplex


@dataclass(frozen=True)
class SphericalSimplex:
    """n+1 unit vertices in (n+1)-space, hemisphere-contained."""

    vertices: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1] - 1

    @property
    def edge_lengths(self) -> np.ndarray:
        v = self.vertices
        iu = np.triu_indices(len(v), k=1)
        dots = np.sum(v[iu[0]] * v[iu[1]], axis=-1)
        return np.arccos(np.clip(dots, -1.0, 1.0))

    @classmethod
    def from_vertices(cls, vertices) -> "SphericalSimplex":
        vertices = np.asarray(vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[0] != vertices.shape[1]:
            raise InvalidInput(
                f"need n+1 unit vertices in (n+1)-space, got shape {vertices.shape}"
            )
        if vertices.shape[1] < 3:
            raise InvalidInput("dimension must be >= 2")
        norms = np.linalg.norm(vertices, axis=-1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise InvalidInput("spherical vertices must be unit vectors")
        if np.linalg.svd(vertices, compute_uv=False)[-1] < 1e-10:
            raise ConditioningError("vertices are (nearly) linearly dependent")
        simplex = cls(vertices)
        spherical_circumsphere(simplex)  # raises HemisphereViolation if R >= pi/2
        return simplex


# --- Euclidean solvers ------------------------------------------------------


def euclidean_circumsphere(s: EuclideanSimplex):
    """(center, R): the point equidistant from all vertices."""
    v = s.vertices
    v0 = v[0]
    a_mat = 2.0 * (v[1:] - v0)
    rhs = np.sum(v[1:] ** 2, axis=-1) - v0 @ v0
    try:
        center = np.linalg.solve(a_mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError("singular circumcenter system") from exc
    radii = np.linalg.norm(v - center, axis=-1)
    if np.max(radii) - np.min(radii) > EQUIDISTANCE_TOL * np.max(radii):
        raise ConditioningError("circumcenter solve is ill-conditioned")
    return center, float(np.mean(radii))


def _facet_hyperplane_distance(facet_points, point) -> float:
    """Distance from a point to the affine hull of n points in n-space."""
    base = facet_points[0]
    edges = facet_points[1:] - base
    # The hyperplane normal is the null vector of the edge matrix.
    _, _, vt = np.linalg.svd(edges)
    normal = vt[-1]
    return abs(float(normal @ (point - base)))


def euclidean_insphere(s: EuclideanSimplex):
    """(center, r): facet-volume weighted vertex average and its common
    distance to the facet hyperplanes."""
    v = s.vertices
    m = len(v)
    weights = np.empty(m)
    for i in range(m):
        facet = np.delete(v, i, axis=0)
        weights[i] = cayley_menger_volume(facet)
    center = (weights[:, None] * v).sum(axis=0) / weights.sum()
    dists = np.array(
        [
            _facet_hyperplane_distance(np.delete(v, i, axis=0), center)
            for i in range(m)
        ]
    )
    if np.max(dists) - np.min(dists) > EQUIDISTANCE_TOL * max(1.0, np.max(dists)):
        raise ConditioningError("incenter facet distances did not equalize")
    return center, float(np.mean(dists))


# --- spherical solvers ------------------------------------------------------


def _unit_null_vector(rows) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    _, sv, vt = np.linalg.svd(rows)
    if sv[-1] > 1e-8 * sv[0] and rows.shape[0] >= rows.shape[1]:
        raise ConditioningError("no null direction in constraint system")
    return vt[-1]


def spherical_circumsphere(s: SphericalSimplex):
    """(center, R): unit vector with equal angle to every vertex, on the
    simplex's hemisphere."""
    v = s.vertices
    center = _unit_null_vector(v[1:] - v[0])
    dots = v @ center
    if np.mean(dots) < 0:
        center, dots = -center, -dots
    if np.max(dots) - np.min(dots) > EQUIDISTANCE_TOL:
        raise ConditioningError("circumcenter dots did not equalize")
    cos_r = float(np.mean(dots))
    if cos_r <= 1e-9:
        raise HemisphereViolation("spherical circumradius >= pi/2")
    return center, float(math.acos(min(1.0, cos_r)))


def _facet_normals(v) -> np.ndarray:
    """Inward unit normals of the facet hyperplanes (all pass through the
    sphere's center)."""
    m = len(v)
    normals = np.empty_like(v)
    for j in range(m):
        facet = np.delete(v, j, axis=0)
        normal = _unit_null_vector(facet)
        if normal @ v[j] < 0:  # orient toward the opposite vertex
            normal = -normal
        normals[j] = normal
    return normals


def spherical_insphere(s: SphericalSimplex):
    """(center, r): unit vector with equal arcsin distance to every facet
    hyperplane, with r the common value."""
    normals = _facet_normals(s.vertices)
    center = _unit_null_vector(normals[1:] - normals[0])
    sines = normals @ center
    if np.mean(sines) < 0:
        center, sines = -center, -sines
    if np.max(sines) - np.min(sines) > EQUIDISTANCE_TOL:
        raise ConditioningError("incenter sines did not equalize")
    sin_r = float(np.mean(sines))
    if not 0.0 < sin_r < 1.0:
        raise ConditioningError("incenter outside the valid range")
    return center, float(math.asin(sin_r))


def gnomonic_project(s: SphericalSimplex) -> EuclideanSimplex:
    """Central projection onto the tangent hyperplane at the circumcenter.

    The image is a Euclidean simplex with circumradius tan R whose edges are
    k * s(d_ij) with k = 2 / cos R.
    """
    center, _ = spherical_circumsphere(s)
    rot = rotation_to_pole(center)
    rotated = s.vertices @ rot.T
    height = rotated[:, -1]
    if np.any(height <= 1e-12):
        raise ProjectionDomainError("vertex at angle >= pi/2 from the circumcenter")
    planar = rotated[:, :-1] / height[:, None]
    return EuclideanSimplex.from_vertices(planar)


# --- transfer of edge-length inequalities ----------------------------------


@dataclass(frozen=True)
class SimplexEvaluation:
    lhs: float
    rhs: float
    gap: float
    holds: bool


def transfer_check(f, s: SphericalSimplex) -> SimplexEvaluation:
    """Evaluate tan R / tan r >= f({s(d_ij)}) on a spherical simplex.

    ``f`` maps the multiset of transformed edge lengths to a scalar and must
    already be certified on Euclidean simplices by the caller.
    """
    _, big_r = spherical_circumsphere(s)
    _, small_r = spherical_insphere(s)
    lhs = math.tan(big_r) / math.tan(small_r)
    rhs = float(f(np.asarray(_s(Geometry.SPHERICAL, s.edge_lengths))))
    gap = lhs - rhs
    return SimplexEvaluation(
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        holds=gap >= -HOLDS_FLOOR * max(abs(lhs), abs(rhs), 1.0),
    )


# --- reference shapes and samplers -----------------------------------------


def regular_euclidean_simplex(n: int, edge: float = 1.0) -> EuclideanSimplex:
    """The regular n-simplex with the given edge length."""
    basis = np.eye(n + 1)  # edge sqrt(2) between basis vectors
    centered = basis - basis.mean(axis=0)
    # Orthonormal basis of the affine hull via SVD.
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    coords = centered @ vt[:n].T
    return EuclideanSimplex.from_vertices(coords * (edge / math.sqrt(2.0)))


def orthant_simplex(n: int) -> SphericalSimplex:
    """The spherical simplex on the standard basis of R^(n+1); the symmetric
    equality case of the spherical Euler inequality."""
    return SphericalSimplex.from_vertices(np.eye(n + 1))


def sample_euclidean_simplex(n: int, seed: int, stream_index: int) -> EuclideanSimplex:
    """Random simplex from standard-normal vertices, rejected while
    (nearly) degenerate."""
    rng = np.random.default_rng((int(seed), int(stream_index)))
    for _ in range(100):
        vertices = rng.standard_normal((n + 1, n))
        try:
            return EuclideanSimplex.from_vertices(vertices)
        except ConditioningError:
            continue
    raise RejectionBudgetExceeded("no well-conditioned Euclidean simplex")


def sample_spherical_simplex(
    n: int,
    seed: int,
    stream_index: int,
    cap_angle: float = math.pi / 2 - 0.1,
    max_circumradius: float = math.pi / 2 - 0.05,
) -> SphericalSimplex:
    """Random hemisphere-contained simplex: n+1 uniform points in a polar
    cap, rejected unless the circumradius stays below the margin."""
    rng = np.random.default_rng((int(seed), int(stream_index)))
    cos_cap = math.cos(cap_angle)
    for _ in range(1000):
        vertices = []
        while len(vertices) < n + 1:
            v = rng.standard_normal(n + 1)
            v /= np.linalg.norm(v)
            if v[-1] < cos_cap:
                continue
            vertices.append(v)
        try:
            simplex = SphericalSimplex.from_vertices(np.asarray(vertices))
            _, big_r = spherical_circumsphere(simplex)
        except (ConditioningError, HemisphereViolation):
            continue
        if big_r < max_circumradius:
            return simplex
    raise RejectionBudgetExceeded("no valid spherical simplex in budget")


# --- randomized verification ------------------------------------------------


@dataclass
class SimplexVerification:
    kind: Geometry
    dimension: int
    samples: int
    violations: int
    min_gap: float
    equality_gap: float  # regular (Euclidean) or orthant (spherical) probe
    wall_time: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "inequality": "simplex-euler",
            "geometry": self.kind.name.lower(),
            "dimension": self.dimension,
            "samples": self.samples,
            "violations": self.violations,
            "min_gap": self.min_gap,
            "equality_gap": self.equality_gap,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }


def verify_simplex_euler(
    kind: Geometry, dimension: int, count: int, seed: int, floor: float = HOLDS_FLOOR
) -> SimplexVerification:
    """Verify R >= n r (Euclidean) or tan R >= n tan r (spherical) over
    ``count`` random simplices, plus the symmetric equality probe."""
    if kind is Geometry.HYPERBOLIC:
        raise InvalidInput("the simplex transfer covers spherical geometry only")
    start = time.perf_counter()
    n = dimension
    violations = 0
    min_gap = math.inf
    for i in range(count):
        if kind is Geometry.EUCLIDEAN:
            simplex = sample_euclidean_simplex(n, seed, i)
            _, big_r = euclidean_circumsphere(simplex)
            _, small_r = euclidean_insphere(simplex)
            lhs, rhs = big_r, n * small_r
        else:
            simplex = sample_spherical_simplex(n, seed, i)
            _, big_r = spherical_circumsphere(simplex)
            _, small_r = spherical_insphere(simplex)
            lhs, rhs = math.tan(big_r), n * math.tan(small_r)
        gap = float(normalized_gap(lhs, rhs))
        min_gap = min(min_gap, gap)
        if gap < -floor:
            violations += 1

    if kind is Geometry.EUCLIDEAN:
        probe = regular_euclidean_simplex(n)
        _, big_r = euclidean_circumsphere(probe)
        _, small_r = euclidean_insphere(probe)
        equality_gap = float(normalized_gap(big_r, n * small_r))
    else:
        probe = orthant_simplex(n)
        _, big_r = spherical_circumsphere(probe)
        _, small_r = spherical_insphere(probe)
        equality_gap = float(normalized_gap(math.tan(big_r), n * math.tan(small_r)))

    return SimplexVerification(
        kind=kind,
        dimension=n,
        samples=count,
        violations=violations,
        min_gap=min_gap,
        equality_gap=equality_gap,
        wall_time=time.perf_counter() - start,
    )
