"""Registry and verification engine for homogeneous triangle inequalities.

Each registered entry is an inequality f(R, r) >= g(a, b, c) between
homogeneous functions of equal degree, a raw side-length inequality, or an
ordered chain of bounds.  Euclidean entries transport to spherical or
hyperbolic geometry through the monotonicity-classified generalization
machine; evaluation, randomized verification and counterexample search all
run vectorized over batches of sampled triangles.
"""

from __future__ import annotations

import enum
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EvaluationError,
    InvalidInput,
    RegistrationError,
    TheoremPreconditionError,
)
from .geometry import (
    Geometry,
    Triangle,
    _s,
    radius_functionals_arrays,
    valid_sides_mask,
)
from .oracle import SamplerConfig, sample_sides

# Relative floor below which a gap counts as a violation.
HOLDS_FLOOR = 1e-12

EQUALITY_PROBE_SCALES = (0.1, 0.5, 1.0, 2.0)

_BATCH = 20_000


class Monotonicity(enum.Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"
    CONSTANT = "constant"
    NEITHER = "neither"


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("CURVTRI_THREADS", "1")))
    except ValueError:
        return 1


def normalized_gap(lhs, rhs):
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1.0)
    return (lhs - rhs) / scale


def holds(lhs, rhs):
    return normalized_gap(lhs, rhs) >= -HOLDS_FLOOR


@dataclass(frozen=True)
class InequalityEvaluation:
    lhs: float
    rhs: float
    gap: float
    holds: bool
    triangle: Triangle


@dataclass(frozen=True)
class CounterexampleRecord:
    inequality: str
    kind: Geometry
    link: str
    a: float
    b: float
    c: float
    lhs: float
    rhs: float
    gap: float
    seed: int
    stream_index: int

    def as_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "geometry": self.kind.name.lower(),
            "link": self.link,
            "sides": [self.a, self.b, self.c],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "seed": self.seed,
            "stream_index": self.stream_index,
        }


# --- monotonicity classification -------------------------------------------


def classify_monotonicity(f, degree: int, grid_size: int = 512) -> Monotonicity:
    """Numeric sign class of x -> f(2 M^2 / x, x) on (0, M].

    Homogeneity makes a single M sufficient; several M values are evaluated
    as a cross-check.  Differences within the noise floor count as flat, so
    a pair that is constant along the probe curve (and therefore transports
    to both geometries) is reported as CONSTANT.
    """
    if grid_size < 64:
        raise InvalidInput("grid_size must be >= 64")
    verdicts = set()
    for big_m in (0.5, 1.0, 2.0):
        x = big_m * np.logspace(-4, 0, grid_size)
        with np.errstate(all="ignore"):
            h = np.asarray(f(2.0 * big_m**2 / x, x), dtype=float)
        if not np.all(np.isfinite(h)):
            raise EvaluationError("non-finite values while classifying monotonicity")
        diffs = np.diff(h)
        tol = 1e-12 * max(1.0, float(np.max(np.abs(h))))
        if np.all(np.abs(diffs) <= tol):
            verdicts.add(Monotonicity.CONSTANT)
        elif np.all(diffs <= tol):
            verdicts.add(Monotonicity.DECREASING)
        elif np.all(diffs >= -tol):
            verdicts.add(Monotonicity.INCREASING)
        else:
            verdicts.add(Monotonicity.NEITHER)
    if len(verdicts) != 1:
        return Monotonicity.NEITHER
    return verdicts.pop()


_ALLOWED_CLASSES = {
    Geometry.SPHERICAL: (Monotonicity.DECREASING, Monotonicity.CONSTANT),
    Geometry.HYPERBOLIC: (Monotonicity.INCREASING, Monotonicity.CONSTANT),
}


# --- registered inequality kinds -------------------------------------------


@dataclass(frozen=True)
class HomogeneousPair:
    """A Euclidean inequality f(R, r) >= g(a, b, c) with declared
    homogeneity degree, transportable by the generalization theorem."""

    name: str
    f: object
    g: object
    degree: int
    claimed_class: Monotonicity
    geometries: tuple = (Geometry.EUCLIDEAN,)
    # Geometries where the claim is asserted by the source directly rather
    # than through the monotonicity theorem (no precondition check).
    direct_geometries: tuple = ()
    equality_iff_equilateral: bool = True

    def links(self):
        return (self.name,)

    def evaluate(self, kind: Geometry, a, b, c):
        evaluator = generalize(self, kind, check_precondition=False)
        return [evaluator(a, b, c)]


@dataclass(frozen=True)
class RawInequality:
    """lhs(kind, a, b, c) >= rhs(kind, a, b, c), asserted per geometry
    without transport (used for the unified bounds that mix full-side and
    half-side terms)."""

    name: str
    lhs_fn: object
    rhs_fn: object
    geometries: tuple
    equality_iff_equilateral: bool = True

    def links(self):
        return (self.name,)

    def evaluate(self, kind: Geometry, a, b, c):
        return [(self.lhs_fn(kind, a, b, c), self.rhs_fn(kind, a, b, c))]


@dataclass(frozen=True)
class ChainInequality:
    """An ordered chain of bounds t_0 >= t_1 >= ... >= t_k evaluated on the
    half-side transforms; each adjacent pair is one link."""

    name: str
    term_names: tuple
    terms: tuple  # callables (kind, a, b, c) -> array
    geometries: tuple
    equality_iff_equilateral: bool = True

    def links(self):
        return tuple(
            f"{left}>={right}"
            for left, right in zip(self.term_names[:-1], self.term_names[1:])
        )

    def evaluate(self, kind: Geometry, a, b, c):
        values = [term(kind, a, b, c) for term in self.terms]
        return list(zip(values[:-1], values[1:]))


def generalize(pair: HomogeneousPair, kind: Geometry, check_precondition: bool = True):
    """Evaluator for a pair in the requested geometry.

    In the non-Euclidean geometries the right-hand side becomes
    2^n * g(s(a), s(b), s(c)) * ((s(a)+s(b)+s(c)) / s(a+b+c))^(n/2); with
    s(x) = x/2 this reduces to the original g, so one formula serves all
    three branches.  When ``check_precondition`` is set, the monotonicity
    class of f must allow the requested transport.
    """
    if check_precondition and kind is not Geometry.EUCLIDEAN:
        observed = classify_monotonicity(pair.f, pair.degree)
        if observed not in _ALLOWED_CLASSES[kind]:
            raise TheoremPreconditionError(
                f"{pair.name}: class {observed.value} does not transport to "
                f"{kind.name.lower()}"
            )
    n = pair.degree

    def evaluator(a, b, c):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        c = np.asarray(c, dtype=float)
        rho_big, rho_small = radius_functionals_arrays(kind, a, b, c)
        lhs = pair.f(rho_big, rho_small)
        sa, sb, sc = _s(kind, a), _s(kind, b), _s(kind, c)
        rhs = (2.0**n) * pair.g(sa, sb, sc)
        if n != 0:
            # Positive base in the valid domain; exp/log keeps fractional
            # powers for odd degrees well-defined.
            ratio = (sa + sb + sc) / _s(kind, a + b + c)
            rhs = rhs * np.exp((n / 2.0) * np.log(ratio))
        return lhs, rhs

    return evaluator


# --- builtin registry -------------------------------------------------------


def _mid_quantity(kind, a, b, c):
    # 2 s((a+b)/2) s((b+c)/2) s((a+c)/2) / (s(a) s(b) s(c))
    num = 2.0 * _s(kind, (a + b) / 2) * _s(kind, (b + c) / 2) * _s(kind, (a + c) / 2)
    return num / (_s(kind, a) * _s(kind, b) * _s(kind, c))


def _rho_ratio(kind, a, b, c):
    rho_big, rho_small = radius_functionals_arrays(kind, a, b, c)
    return rho_big / rho_small


def _chain_cubic(kind, a, b, c):
    sa, sb, sc = _s(kind, a), _s(kind, b), _s(kind, c)
    return (sa * sb * sc + sa**3 + sb**3 + sc**3) / (2.0 * sa * sb * sc)


def _chain_cyclic(kind, a, b, c):
    sa, sb, sc = _s(kind, a), _s(kind, b), _s(kind, c)
    return sa / sb + sb / sc + sc / sa - 1.0


def _chain_cyclic_23(kind, a, b, c):
    sa, sb, sc = _s(kind, a), _s(kind, b), _s(kind, c)
    return (2.0 / 3.0) * (sa / sb + sb / sc + sc / sa)


_ALL = (Geometry.EUCLIDEAN, Geometry.SPHERICAL, Geometry.HYPERBOLIC)

_BUILTIN_ALIASES = {"eq4-spherical-chain": "eq4-chain"}

_REGISTRY_CACHE: dict | None = None


def _build_registry() -> dict:
    entries = [
        HomogeneousPair(
            name="euler",
            f=lambda x, y: x / y,
            g=lambda x, y, z: 2.0 + 0.0 * x,
            degree=0,
            claimed_class=Monotonicity.DECREASING,
            geometries=_ALL,
            # tanh R >= 2 tanh r is asserted by its source independently of
            # the transport theorem (whose spherical-only precondition holds).
            direct_geometries=(Geometry.HYPERBOLIC,),
        ),
        ChainInequality(
            name="eq4-chain",
            term_names=("rho-ratio", "cubic-mean", "cyclic-sum", "cyclic-sum-2/3", "two"),
            terms=(
                _rho_ratio,
                _chain_cubic,
                _chain_cyclic,
                _chain_cyclic_23,
                lambda kind, a, b, c: 2.0 + 0.0 * np.asarray(a, dtype=float),
            ),
            geometries=(Geometry.EUCLIDEAN, Geometry.SPHERICAL),
        ),
        RawInequality(
            name="eq5-lower",
            lhs_fn=_mid_quantity,
            rhs_fn=lambda kind, a, b, c: 2.0 + 0.0 * np.asarray(a, dtype=float),
            geometries=_ALL,
        ),
        RawInequality(
            name="eq5-upper",
            lhs_fn=_rho_ratio,
            rhs_fn=_mid_quantity,
            geometries=_ALL,
        ),
        HomogeneousPair(
            name="eq6",
            f=lambda x, y: x / y,
            g=lambda x, y, z: 2.0
            * (x + y + z)
            * (x**3 + y**3 + z**3)
            / (x * y + y * z + z * x) ** 2,
            degree=0,
            claimed_class=Monotonicity.DECREASING,
            geometries=(Geometry.EUCLIDEAN, Geometry.SPHERICAL),
        ),
        HomogeneousPair(
            name="eq7-left",
            f=lambda x, y: 2.0 * x**2 + y**2,
            g=lambda x, y, z: 0.25 * (x**2 + y**2 + z**2),
            degree=2,
            claimed_class=Monotonicity.DECREASING,
            geometries=(Geometry.EUCLIDEAN, Geometry.SPHERICAL),
        ),
        HomogeneousPair(
            name="eq7-right",
            f=lambda x, y: -3.0 * y * (2.0 * x - y),
            g=lambda x, y, z: -0.25 * (x**2 + y**2 + z**2),
            degree=2,
            claimed_class=Monotonicity.INCREASING,
            geometries=(Geometry.EUCLIDEAN, Geometry.HYPERBOLIC),
        ),
        HomogeneousPair(
            name="eq8-left",
            f=lambda x, y: 1.0 / (4.0 * y**2),
            g=lambda x, y, z: 1.0 / x**2 + 1.0 / y**2 + 1.0 / z**2,
            degree=-2,
            claimed_class=Monotonicity.DECREASING,
            geometries=(Geometry.EUCLIDEAN, Geometry.SPHERICAL),
        ),
        HomogeneousPair(
            name="eq8-right",
            f=lambda x, y: -1.0 / (2.0 * x * y),
            g=lambda x, y, z: -(1.0 / x + 1.0 / y + 1.0 / z) ** 2 / 3.0,
            degree=-2,
            claimed_class=Monotonicity.CONSTANT,
            geometries=_ALL,
        ),
    ]
    base_sides = sample_sides(
        Geometry.EUCLIDEAN, SamplerConfig(seed=987, max_side=3.0), 0, 10_000
    )
    registry = {}
    for entry in entries:
        _registration_check(entry, base_sides)
        registry[entry.name] = entry
    return registry


def _registration_check(entry, base_sides) -> None:
    rng = np.random.default_rng(20240801)
    if isinstance(entry, HomogeneousPair):
        x = rng.uniform(0.5, 3.0, 64)
        y = x * rng.uniform(0.05, 0.45, 64)  # r < R/2 on Euclidean triangles
        z = rng.uniform(0.5, 3.0, 64)
        lam = rng.uniform(0.1, 10.0, 64)
        scale = lam**entry.degree
        for label, got, want in (
            ("f", entry.f(lam * x, lam * y), scale * entry.f(x, y)),
            ("g", entry.g(lam * x, lam * y, lam * z), scale * entry.g(x, y, z)),
        ):
            err = np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-30))
            if err > 1e-9:
                raise RegistrationError(
                    f"{entry.name}: {label} is not homogeneous of degree "
                    f"{entry.degree} (relative error {err:.2e})"
                )
        observed = classify_monotonicity(entry.f, entry.degree)
        if observed is not entry.claimed_class:
            raise RegistrationError(
                f"{entry.name}: classified {observed.value}, "
                f"claimed {entry.claimed_class.value}"
            )
    # Euclidean base self-test before any transport is trusted.
    if Geometry.EUCLIDEAN in entry.geometries:
        a, b, c = base_sides[:, 0], base_sides[:, 1], base_sides[:, 2]
        for link_name, (lhs, rhs) in zip(
            entry.links(), entry.evaluate(Geometry.EUCLIDEAN, a, b, c)
        ):
            bad = ~holds(lhs, rhs)
            if np.any(bad):
                i = int(np.argmin(normalized_gap(lhs, rhs)))
                raise RegistrationError(
                    f"{entry.name}: Euclidean base of link {link_name} fails at "
                    f"sides ({a[i]}, {b[i]}, {c[i]})"
                )


def registry_builtin() -> dict:
    """Name -> registered inequality; every entry has passed its
    registration self-checks.  Built once per process."""
    global _REGISTRY_CACHE
    if _REGISTRY_CACHE is None:
        _REGISTRY_CACHE = _build_registry()
    return _REGISTRY_CACHE


def lookup(name: str):
    registry = registry_builtin()
    canonical = _BUILTIN_ALIASES.get(name, name)
    if canonical not in registry:
        known = sorted(registry) + sorted(_BUILTIN_ALIASES)
        raise InvalidInput(f"unknown inequality {name!r}; known: {', '.join(known)}")
    return registry[canonical]


# --- scalar evaluation ------------------------------------------------------


def evaluate_on_triangle(entry, t: Triangle) -> list[InequalityEvaluation]:
    """One :class:`InequalityEvaluation` per link of ``entry`` on ``t``."""
    a = np.asarray([t.a])
    results = []
    for lhs, rhs in entry.evaluate(t.kind, a, np.asarray([t.b]), np.asarray([t.c])):
        lhs_v, rhs_v = float(lhs[0]), float(rhs[0])
        results.append(
            InequalityEvaluation(
                lhs=lhs_v,
                rhs=rhs_v,
                gap=lhs_v - rhs_v,
                holds=bool(holds(lhs_v, rhs_v)),
                triangle=t,
            )
        )
    return results


def evaluate_chain(chain: ChainInequality, t: Triangle) -> list[InequalityEvaluation]:
    return evaluate_on_triangle(chain, t)


# --- randomized verification ------------------------------------------------


@dataclass
class LinkSummary:
    name: str
    violations: int = 0
    min_gap: float = math.inf
    min_gap_sides: tuple = ()
    equality_probe_gaps: dict = field(default_factory=dict)


@dataclass
class VerificationResult:
    inequality: str
    kind: Geometry
    samples: int
    links: list
    most_equilateral_sides: tuple
    most_equilateral_gap: float
    wall_time: float

    @property
    def violations(self) -> int:
        return sum(link.violations for link in self.links)

    @property
    def min_gap(self) -> float:
        return min(link.min_gap for link in self.links)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "geometry": self.kind.name.lower(),
            "samples": self.samples,
            "violations": self.violations,
            "min_gap": self.min_gap,
            "most_equilateral_sides": list(self.most_equilateral_sides),
            "most_equilateral_gap": self.most_equilateral_gap,
            "links": [
                {
                    "name": link.name,
                    "violations": link.violations,
                    "min_gap": link.min_gap,
                    "min_gap_sides": list(link.min_gap_sides),
                    "equality_probe_gaps": link.equality_probe_gaps,
                }
                for link in self.links
            ],
            "pass": self.passed,
            "wall_time": self.wall_time,
        }


def _batch_plan(count: int):
    streams = []
    offset = 0
    index = 0
    while offset < count:
        size = min(_BATCH, count - offset)
        streams.append((index, size))
        offset += size
        index += 1
    return streams


def verify_inequality(
    name: str, kind: Geometry, cfg: SamplerConfig, floor: float = HOLDS_FLOOR
) -> VerificationResult:
    """Sample cfg.count triangles and verify every link of the named
    inequality, plus exact equilateral probes at several scales."""
    entry = lookup(name)
    if kind not in entry.geometries:
        raise InvalidInput(
            f"{name} is not claimed to hold in {kind.name.lower()} geometry"
        )
    start = time.perf_counter()
    links = [LinkSummary(link_name) for link_name in entry.links()]
    best_spread = math.inf
    best_sides = ()
    best_gap = math.nan

    def run_batch(plan):
        stream_index, size = plan
        sides = sample_sides(kind, cfg, stream_index, size)
        a, b, c = sides[:, 0], sides[:, 1], sides[:, 2]
        return sides, entry.evaluate(kind, a, b, c)

    plans = _batch_plan(cfg.count)
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run_batch, plans))
    else:
        batches = [run_batch(plan) for plan in plans]

    for sides, evaluations in batches:  # merged in stream order
        spreads = np.max(sides, axis=-1) - np.min(sides, axis=-1)
        i_eq = int(np.argmin(spreads))
        gaps_eq = []
        for link, (lhs, rhs) in zip(links, evaluations):
            gaps = normalized_gap(lhs, rhs)
            link.violations += int(np.sum(gaps < -floor))
            i_min = int(np.argmin(gaps))
            if gaps[i_min] < link.min_gap:
                link.min_gap = float(gaps[i_min])
                link.min_gap_sides = tuple(float(x) for x in sides[i_min])
            gaps_eq.append(float(gaps[i_eq]))
        if spreads[i_eq] < best_spread:
            best_spread = float(spreads[i_eq])
            best_sides = tuple(float(x) for x in sides[i_eq])
            best_gap = min(gaps_eq)

    for scale in EQUALITY_PROBE_SCALES:
        x = np.asarray([scale])
        for link, (lhs, rhs) in zip(links, entry.evaluate(kind, x, x, x)):
            link.equality_probe_gaps[str(scale)] = float(
                normalized_gap(lhs, rhs)[0]
            )

    return VerificationResult(
        inequality=name,
        kind=kind,
        samples=cfg.count,
        links=links,
        most_equilateral_sides=best_sides,
        most_equilateral_gap=best_gap,
        wall_time=time.perf_counter() - start,
    )


# --- counterexample search --------------------------------------------------


def _min_link_gap(entry, kind, a, b, c):
    """Minimum normalized gap across links, elementwise, plus argmin link."""
    gaps = np.stack(
        [normalized_gap(lhs, rhs) for lhs, rhs in entry.evaluate(kind, a, b, c)]
    )
    link_idx = np.argmin(gaps, axis=0)
    return np.min(gaps, axis=0), link_idx


def search_counterexample(
    name: str, kind: Geometry, budget: int, cfg: SamplerConfig
) -> CounterexampleRecord | None:
    """Random search plus coordinate-descent refinement toward negative gap.

    The inequality need not be claimed in ``kind``; that is the point.
    Returns the first verified violator, or None once the evaluation budget
    is exhausted.
    """
    entry = lookup(name)
    spent = 0
    stream = 0
    best = None  # (gap, sides, stream_index)
    while spent < budget:
        size = min(_BATCH, budget - spent)
        sides = sample_sides(kind, cfg, stream, size)
        gaps, link_idx = _min_link_gap(entry, kind, sides[:, 0], sides[:, 1], sides[:, 2])
        spent += size
        i = int(np.argmin(gaps))
        if best is None or gaps[i] < best[0]:
            best = (float(gaps[i]), sides[i].copy(), stream)
        if gaps[i] < -HOLDS_FLOOR:
            return _verified_record(entry, name, kind, sides[i], cfg.seed, stream)
        stream += 1
        # Refine the current best candidate with the remaining budget.
        if spent >= budget // 2 and best is not None and best[0] >= -HOLDS_FLOOR:
            refined, used = _coordinate_descent(
                entry, kind, best[1], budget - spent
            )
            spent += used
            gap_r, _ = _min_link_gap(
                entry, kind, *(np.asarray([x]) for x in refined)
            )
            if gap_r[0] < best[0]:
                best = (float(gap_r[0]), np.asarray(refined), best[2])
            if best[0] < -HOLDS_FLOOR:
                return _verified_record(entry, name, kind, best[1], cfg.seed, best[2])
    return None


def _coordinate_descent(entry, kind, sides, budget):
    sides = np.asarray(sides, dtype=float).copy()
    gap, _ = _min_link_gap(entry, kind, *(np.asarray([x]) for x in sides))
    gap = float(gap[0])
    step = 0.25 * float(np.max(sides))
    used = 0
    while used < budget and step > 1e-12:
        improved = False
        for axis in range(3):
            for sign in (+1.0, -1.0):
                trial = sides.copy()
                trial[axis] += sign * step
                used += 1
                if not bool(valid_sides_mask(kind, *trial)):
                    continue
                g, _ = _min_link_gap(entry, kind, *(np.asarray([x]) for x in trial))
                if float(g[0]) < gap:
                    sides, gap = trial, float(g[0])
                    improved = True
            if used >= budget:
                break
        if not improved:
            step /= 2.0
    return tuple(sides), used


def _verified_record(entry, name, kind, sides, seed, stream_index):
    a, b, c = (np.asarray([float(x)]) for x in sides)
    gaps, link_idx = _min_link_gap(entry, kind, a, b, c)
    link = entry.links()[int(link_idx[0])]
    evaluations = entry.evaluate(kind, a, b, c)
    lhs, rhs = evaluations[int(link_idx[0])]
    return CounterexampleRecord(
        inequality=name,
        kind=kind,
        link=link,
        a=float(sides[0]),
        b=float(sides[1]),
        c=float(sides[2]),
        lhs=float(lhs[0]),
        rhs=float(rhs[0]),
        gap=float(gaps[0]),
        seed=seed,
        stream_index=stream_index,
    )
