"""Independent geometric ground truth for the closed-form radius formulas.

Triangles are synthesized from random vertices, and circumcenters/incenters
are recovered from the vertices alone (linear solves on the sphere and on the
hyperboloid model, perpendicular bisectors in the plane), never through the
side-length formulas they are meant to validate.  Derivative-free searches in
the Klein disk are kept alongside the hyperboloid solves as cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (
    ConditioningError,
    InvalidInput,
    NoCircumcircle,
    ProjectionDomainError,
    RejectionBudgetExceeded,
)
from .geometry import (
    Geometry,
    Triangle,
    klein_distance,
    klein_distance_arrays,
    side_lengths_from_vertices,
    valid_sides_mask,
    validate_triangle,
)

REJECTION_BUDGET = 10_000


@dataclass(frozen=True)
class SamplerConfig:
    """Deterministic rejection-sampler parameters.

    ``cap_angle`` bounds the spherical vertex cap (half-angle around the
    north pole); the margin below pi/2 keeps the tangent-plane projection
    well conditioned.  ``max_side`` sets the Euclidean box size and the
    Klein sub-disk radius tanh(max_side).
    """

    seed: int = 0
    min_side: float = 0.05
    max_side: float = 2.0
    count: int = 1000
    cap_angle: float = math.pi / 2 - 0.05

    def __post_init__(self):
        if self.min_side <= 0:
            raise InvalidInput("min_side must be positive")
        if self.count < 1:
            raise InvalidInput("count must be >= 1")
        if not 0 < self.cap_angle < math.pi / 2:
            raise InvalidInput("cap_angle must lie in (0, pi/2)")


@dataclass(frozen=True)
class EmbeddedTriangle:
    kind: Geometry
    vertices: np.ndarray = field(repr=False)  # shape (3, 2) or (3, 3)
    sides: Triangle

    @classmethod
    def from_vertices(cls, kind: Geometry, vertices) -> "EmbeddedTriangle":
        vertices = np.asarray(vertices, dtype=float)
        sides = side_lengths_from_vertices(kind, *vertices)
        return cls(kind, vertices, sides)


def _rng(seed: int, stream_index: int) -> np.random.Generator:
    # Counter-based streams: each (seed, stream) pair is an independent,
    # reproducible generator, so batches partition across workers.
    return np.random.default_rng((int(seed), int(stream_index)))


# --- vertex batches ---------------------------------------------------------


def _spherical_cap_points(rng, n, cap_angle):
    z = rng.uniform(math.cos(cap_angle), 1.0, n)
    theta = rng.uniform(0.0, 2 * math.pi, n)
    rho = np.sqrt(np.maximum(0.0, 1.0 - z**2))
    return np.stack([rho * np.cos(theta), rho * np.sin(theta), z], axis=-1)


def _klein_disk_points(rng, n, max_side):
    radius = math.tanh(max_side) * np.sqrt(rng.uniform(0.0, 1.0, n))
    theta = rng.uniform(0.0, 2 * math.pi, n)
    return np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=-1)


def _vertex_batch(kind: Geometry, cfg: SamplerConfig, rng, n):
    if kind is Geometry.SPHERICAL:
        return _spherical_cap_points(rng, 3 * n, cfg.cap_angle).reshape(n, 3, 3)
    if kind is Geometry.HYPERBOLIC:
        return _klein_disk_points(rng, 3 * n, cfg.max_side).reshape(n, 3, 2)
    return rng.uniform(0.0, cfg.max_side, (n, 3, 2))


def _sides_of_batch(kind: Geometry, verts):
    if kind is Geometry.EUCLIDEAN:
        d = lambda i, j: np.linalg.norm(verts[:, i] - verts[:, j], axis=-1)
    elif kind is Geometry.SPHERICAL:
        d = lambda i, j: np.arccos(
            np.clip(np.sum(verts[:, i] * verts[:, j], axis=-1), -1.0, 1.0)
        )
    else:
        d = lambda i, j: klein_distance_arrays(verts[:, i], verts[:, j])
    return np.stack([d(1, 2), d(0, 2), d(0, 1)], axis=-1)


def sample_embedded_batch(kind: Geometry, cfg: SamplerConfig, stream_index: int, n: int):
    """n valid random triangles as (vertices, sides) arrays.

    Deterministic given (cfg.seed, stream_index).  Raises
    :class:`RejectionBudgetExceeded` after 10^4 consecutive rejections.
    """
    rng = _rng(cfg.seed, stream_index)
    verts_out, sides_out = [], []
    have = 0
    rejected_streak = 0
    while have < n:
        m = max(2 * (n - have), 64)
        verts = _vertex_batch(kind, cfg, rng, m)
        sides = _sides_of_batch(kind, verts)
        ok = valid_sides_mask(kind, sides[:, 0], sides[:, 1], sides[:, 2])
        ok &= np.min(sides, axis=-1) >= cfg.min_side
        taken = int(ok.sum())
        if taken == 0:
            rejected_streak += m
            if rejected_streak >= REJECTION_BUDGET:
                raise RejectionBudgetExceeded(
                    f"no valid {kind.name.lower()} triangle in {rejected_streak} draws"
                )
            continue
        rejected_streak = 0
        verts_out.append(verts[ok][: n - have])
        sides_out.append(sides[ok][: n - have])
        have += min(taken, n - have)
    return np.concatenate(verts_out), np.concatenate(sides_out)


def sample_sides(kind: Geometry, cfg: SamplerConfig, stream_index: int, n: int):
    """(n, 3) array of valid side triples; see :func:`sample_embedded_batch`."""
    _, sides = sample_embedded_batch(kind, cfg, stream_index, n)
    return sides


def sample_triangle(kind: Geometry, cfg: SamplerConfig, stream_index: int) -> EmbeddedTriangle:
    """One deterministic random triangle for the given (seed, stream_index)."""
    verts, sides = sample_embedded_batch(kind, cfg, stream_index, 1)
    tri = validate_triangle(kind, *sides[0])
    return EmbeddedTriangle(kind, verts[0], tri)


def sample_centered_hyperbolic(cfg: SamplerConfig, stream_index: int) -> EmbeddedTriangle:
    """A hyperbolic triangle whose three vertices are equidistant from the
    Klein-disk origin (its circumcenter), sampled directly instead of moving
    a generic triangle by an isometry."""
    rng = _rng(cfg.seed, stream_index)
    for _ in range(REJECTION_BUDGET):
        u = rng.uniform(0.2, 1.0) * math.tanh(cfg.max_side)
        angles = rng.uniform(0.0, 2 * math.pi, 3)
        verts = u * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        sides = _sides_of_batch(Geometry.HYPERBOLIC, verts[None])[0]
        ok = valid_sides_mask(Geometry.HYPERBOLIC, *sides)
        if bool(ok) and float(np.min(sides)) >= cfg.min_side:
            tri = validate_triangle(Geometry.HYPERBOLIC, *sides)
            return EmbeddedTriangle(Geometry.HYPERBOLIC, verts, tri)
    raise RejectionBudgetExceeded("no valid centered hyperbolic triangle")


# --- hyperboloid model helpers ----------------------------------------------

_G = np.diag([1.0, 1.0, -1.0])  # Minkowski form of signature (+, +, -)


def _mink(u, v):
    return np.sum(u[..., :2] * v[..., :2], axis=-1) - u[..., 2] * v[..., 2]


def _klein_to_hyperboloid(p):
    p = np.asarray(p, dtype=float)
    t = 1.0 / np.sqrt(1.0 - np.sum(p * p, axis=-1))
    return np.concatenate([p * t[..., None], t[..., None]], axis=-1)


def _hyperboloid_to_klein(u):
    return u[..., :2] / u[..., 2:3]


# --- circumcenter -----------------------------------------------------------


def _conditioning(kind: Geometry, verts):
    """Mask of triangles on which vertex solves and side formulas can agree
    at the 1e-8 level.  Two independent failure modes are excluded: chordally
    thin triangles (ill-conditioned linear solves) and triangles whose
    triangle-inequality slack a+b-c is tiny relative to the perimeter, where
    the s(a+b-c) factor of the closed forms loses most of its digits to
    cancellation even though the embedded triangle may be fat (three spherical
    points near a common great circle, for instance)."""
    v0, v1, v2 = verts[:, 0], verts[:, 1], verts[:, 2]
    d1, d2 = v1 - v0, v2 - v0
    if verts.shape[-1] == 2:
        area2 = np.abs(d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0])
    else:
        area2 = np.linalg.norm(np.cross(d1, d2), axis=-1)
    chord_sq = np.maximum(
        np.maximum(
            np.sum((v1 - v0) ** 2, -1),
            np.sum((v2 - v0) ** 2, -1),
        ),
        np.sum((v2 - v1) ** 2, -1),
    )
    ok = area2 > 1e-2 * chord_sq
    sides = _sides_of_batch(kind, verts)
    a, b, c = sides[:, 0], sides[:, 1], sides[:, 2]
    slack = np.minimum(np.minimum(a + b - c, a + c - b), b + c - a)
    return ok & (slack > 1e-6 * (a + b + c))


def circumcenter_batch(kind: Geometry, verts):
    """Vectorized vertex-based circumcenters.

    Returns (centers, rho, ok): model-point centers, the radius functional
    rho(R), and a mask of triangles where the solve succeeded (hyperbolic
    triangles without a circumscribed circle are masked out).
    """
    verts = np.asarray(verts, dtype=float)
    if kind is Geometry.EUCLIDEAN:
        v0, v1, v2 = verts[:, 0], verts[:, 1], verts[:, 2]
        # Perpendicular-bisector system: 2 (v_i - v0) . x = |v_i|^2 - |v0|^2
        a_mat = 2.0 * np.stack([v1 - v0, v2 - v0], axis=1)
        rhs = np.stack(
            [
                np.sum(v1 * v1, -1) - np.sum(v0 * v0, -1),
                np.sum(v2 * v2, -1) - np.sum(v0 * v0, -1),
            ],
            axis=-1,
        )
        det = a_mat[:, 0, 0] * a_mat[:, 1, 1] - a_mat[:, 0, 1] * a_mat[:, 1, 0]
        ok = np.abs(det) > 1e-14
        safe = np.where(ok, det, 1.0)
        cx = (rhs[:, 0] * a_mat[:, 1, 1] - rhs[:, 1] * a_mat[:, 0, 1]) / safe
        cy = (rhs[:, 1] * a_mat[:, 0, 0] - rhs[:, 0] * a_mat[:, 1, 0]) / safe
        centers = np.stack([cx, cy], axis=-1)
        rho = np.linalg.norm(centers - v0, axis=-1)
        ok &= _conditioning(kind, verts)
        return centers, rho, ok

    if kind is Geometry.SPHERICAL:
        v0, v1, v2 = verts[:, 0], verts[:, 1], verts[:, 2]
        normal = np.cross(v1 - v0, v2 - v0)
        norm = np.linalg.norm(normal, axis=-1)
        ok = norm > 1e-14
        normal = normal / np.where(ok, norm, 1.0)[..., None]
        dot = np.sum(normal * v0, axis=-1)
        # Choose the center on the vertices' hemisphere (positive dot).
        centers = np.where(dot[..., None] >= 0, normal, -normal)
        cos_r = np.abs(dot)
        ok &= cos_r > 1e-12  # circumradius pi/2 is outside the valid domain
        ok &= _conditioning(kind, verts)
        rho = np.sqrt(np.maximum(0.0, 1.0 - cos_r**2)) / np.where(ok, cos_r, 1.0)
        return centers, rho, ok

    lifted = _klein_to_hyperboloid(verts)
    v0, v1, v2 = lifted[:, 0], lifted[:, 1], lifted[:, 2]
    w1 = (v0 - v1) @ _G
    w2 = (v0 - v2) @ _G
    center = np.cross(w1, w2)
    q = _mink(center, center)
    ok = q < -1e-28  # timelike center <=> the circumscribed circle exists
    center = center / np.sqrt(np.where(ok, -q, 1.0))[..., None]
    center = np.where(center[..., 2:3] < 0, -center, center)
    cosh_r = np.maximum(1.0, -_mink(center, v0))
    rho = np.tanh(np.arccosh(cosh_r))
    return _hyperboloid_to_klein(center), rho, ok


def circumcenter_oracle(e: EmbeddedTriangle):
    """(center, rho(R)) from the vertices alone."""
    centers, rho, ok = circumcenter_batch(e.kind, e.vertices[None])
    if not ok[0]:
        if e.kind is Geometry.HYPERBOLIC:
            raise NoCircumcircle(
                "hyperbolic triangle has no circumscribed circle"
            )
        raise ConditioningError("near-degenerate triangle in circumcenter solve")
    return centers[0], float(rho[0])


# --- incenter ---------------------------------------------------------------


def incenter_batch(kind: Geometry, verts):
    """Vectorized vertex-based incenters; same return convention as
    :func:`circumcenter_batch`."""
    verts = np.asarray(verts, dtype=float)
    if kind is Geometry.EUCLIDEAN:
        v0, v1, v2 = verts[:, 0], verts[:, 1], verts[:, 2]
        a = np.linalg.norm(v1 - v2, axis=-1)
        b = np.linalg.norm(v0 - v2, axis=-1)
        c = np.linalg.norm(v0 - v1, axis=-1)
        per = a + b + c
        ok = per > 1e-14
        centers = (a[..., None] * v0 + b[..., None] * v1 + c[..., None] * v2) / per[..., None]
        # Distance to line v0 v1 via the 2D cross product.
        edge = v1 - v0
        rel = centers - v0
        area2 = np.abs(edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0])
        rho = area2 / np.maximum(np.linalg.norm(edge, axis=-1), 1e-300)
        ok &= _conditioning(kind, verts)
        return centers, rho, ok

    if kind is Geometry.SPHERICAL:
        v0, v1, v2 = verts[:, 0], verts[:, 1], verts[:, 2]

        def inward_normal(p, q, opposite):
            m = np.cross(p, q)
            m = m / np.maximum(np.linalg.norm(m, axis=-1), 1e-300)[..., None]
            sign = np.sign(np.sum(m * opposite, axis=-1))
            return m * sign[..., None]

        m0 = inward_normal(v1, v2, v0)
        m1 = inward_normal(v0, v2, v1)
        m2 = inward_normal(v0, v1, v2)
        center = np.cross(m0 - m1, m0 - m2)
        norm = np.linalg.norm(center, axis=-1)
        ok = norm > 1e-14
        center = center / np.where(ok, norm, 1.0)[..., None]
        sin_r = np.sum(center * m0, axis=-1)
        center = np.where(sin_r[..., None] < 0, -center, center)
        sin_r = np.abs(sin_r)
        ok &= sin_r < 1.0
        ok &= _conditioning(kind, verts)
        rho = sin_r / np.sqrt(np.maximum(1e-300, 1.0 - sin_r**2))
        return center, rho, ok

    lifted = _klein_to_hyperboloid(verts)
    v0, v1, v2 = lifted[:, 0], lifted[:, 1], lifted[:, 2]

    def side_pole(p, q, opposite):
        # Unit spacelike Lorentz-pole of the geodesic through p and q,
        # oriented toward the opposite vertex; sinh(dist to line) = <u, pole>.
        w = np.cross(p @ _G, q @ _G)
        w = w / np.sqrt(np.maximum(1e-300, _mink(w, w)))[..., None]
        sign = np.sign(_mink(w, opposite))
        return w * sign[..., None]

    p0 = side_pole(v1, v2, v0)
    p1 = side_pole(v0, v2, v1)
    p2 = side_pole(v0, v1, v2)
    center = np.cross((p0 - p1) @ _G, (p0 - p2) @ _G)
    q = _mink(center, center)
    ok = q < -1e-28
    center = center / np.sqrt(np.where(ok, -q, 1.0))[..., None]
    center = np.where(center[..., 2:3] < 0, -center, center)
    sinh_r = np.abs(_mink(center, p0))
    rho = np.tanh(np.arcsinh(sinh_r))
    return _hyperboloid_to_klein(center), rho, ok


def incenter_oracle(e: EmbeddedTriangle):
    """(center, rho(r)) from the vertices alone."""
    centers, rho, ok = incenter_batch(e.kind, e.vertices[None])
    if not ok[0]:
        raise ConditioningError("near-degenerate triangle in incenter solve")
    return centers[0], float(rho[0])


# --- tangent-plane projection ----------------------------------------------


def rotation_to_pole(c) -> np.ndarray:
    """Rotation matrix taking the unit vector c to the last basis vector,
    acting only in the span(c, pole) plane.  Works in any dimension."""
    c = np.asarray(c, dtype=float)
    dim = c.shape[0]
    pole = np.zeros(dim)
    pole[-1] = 1.0
    cos_t = float(c @ pole)
    w = pole - cos_t * c
    norm_w = np.linalg.norm(w)
    if norm_w < 1e-15:
        return np.eye(dim) if cos_t > 0 else -np.eye(dim)
    w = w / norm_w
    sin_t = norm_w
    rot = np.eye(dim)
    rot += (cos_t - 1.0) * (np.outer(c, c) + np.outer(w, w))
    rot += sin_t * (np.outer(w, c) - np.outer(c, w))
    return rot


def tangent_projection(e: EmbeddedTriangle) -> EmbeddedTriangle:
    """Gnomonic projection of a spherical triangle about its circumcenter.

    Rotates the circumcenter to the north pole and projects each vertex from
    the sphere's center onto the tangent plane there.  The image is a
    Euclidean triangle with sides k * s(a), k * s(b), k * s(c) where
    k = 2 / cos R.
    """
    if e.kind is not Geometry.SPHERICAL:
        raise InvalidInput("tangent projection applies to spherical triangles")
    center, _ = circumcenter_oracle(e)
    rot = rotation_to_pole(center)
    rotated = e.vertices @ rot.T
    z = rotated[:, 2]
    if np.any(z <= 1e-12):
        raise ProjectionDomainError("vertex at angle >= pi/2 from the pole")
    planar = rotated[:, :2] / z[:, None]
    return EmbeddedTriangle.from_vertices(Geometry.EUCLIDEAN, planar)


# --- slow cross-check oracles (Klein-disk searches) ------------------------


def klein_distance_chord(p, q) -> float:
    """Boundary-point construction of the Klein-disk distance: intersect the
    chord through p, q with the unit circle and take half the log cross-ratio.
    Kept as an independent oracle for :func:`curvtri.geometry.klein_distance`.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    sep = np.linalg.norm(q - p)
    if sep < 1e-300:
        return 0.0
    u = (q - p) / sep
    # |p + t u| = 1  =>  t^2 + 2 t (p.u) + |p|^2 - 1 = 0
    half_b = p @ u
    disc = math.sqrt(half_b**2 - (p @ p - 1.0))
    t_a = -half_b - disc  # beyond p
    t_b = -half_b + disc  # beyond q
    pt_a = p + t_a * u
    pt_b = p + t_b * u
    dist = lambda x, y: np.linalg.norm(x - y)
    ratio = (dist(pt_a, q) * dist(p, pt_b)) / (dist(pt_a, p) * dist(q, pt_b))
    return 0.5 * math.log(ratio)


def chord_distance_numeric(p, q1, q2) -> float:
    """Hyperbolic distance from p to the full geodesic through q1, q2,
    minimized numerically along the chord between its ideal endpoints."""
    p = np.asarray(p, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    u = (q2 - q1) / np.linalg.norm(q2 - q1)
    half_b = q1 @ u
    disc = math.sqrt(half_b**2 - (q1 @ q1 - 1.0))
    lo, hi = -half_b - disc, -half_b + disc
    eps = 1e-9 * (hi - lo)

    def objective(t):
        return klein_distance(p, q1 + t * u)

    res = optimize.minimize_scalar(
        objective, bounds=(lo + eps, hi - eps), method="bounded",
        options={"xatol": 1e-13},
    )
    return float(res.fun)


def _nelder_mead_center(e: EmbeddedTriangle, residual) -> np.ndarray:
    x0 = e.vertices.mean(axis=0)
    res = optimize.minimize(
        residual, x0, method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-24, "maxiter": 500, "maxfev": 2000},
    )
    return np.asarray(res.x, dtype=float)


def hyperbolic_circumcenter_search(e: EmbeddedTriangle):
    """Derivative-free circumcenter: equalize the three Klein distances.
    Slow; used to cross-check the hyperboloid-model linear solve."""
    verts = e.vertices

    def residual(p):
        if p @ p >= 0.999999999:
            return 1e6 + float(p @ p)
        d = [klein_distance(p, v) for v in verts]
        return (d[0] - d[1]) ** 2 + (d[0] - d[2]) ** 2

    center = _nelder_mead_center(e, residual)
    if residual(center) > 1e-16:
        raise ConditioningError("circumcenter search did not converge")
    return center, math.tanh(klein_distance(center, verts[0]))


def hyperbolic_incenter_search(e: EmbeddedTriangle):
    """Derivative-free incenter: equalize the three point-to-chord distances,
    each minimized numerically along its chord."""
    verts = e.vertices
    chords = [(verts[1], verts[2]), (verts[0], verts[2]), (verts[0], verts[1])]

    def residual(p):
        if p @ p >= 0.999999999:
            return 1e6 + float(p @ p)
        d = [chord_distance_numeric(p, q1, q2) for q1, q2 in chords]
        return (d[0] - d[1]) ** 2 + (d[0] - d[2]) ** 2

    center = _nelder_mead_center(e, residual)
    if residual(center) > 1e-16:
        raise ConditioningError("incenter search did not converge")
    return center, math.tanh(chord_distance_numeric(center, *chords[0]))
