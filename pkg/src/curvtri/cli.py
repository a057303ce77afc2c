"""Batch command-line front end.

Subcommands: compute, sample, verify, search, simplex, plotdata.
Exit codes: 0 pass, 1 violation or unmet expectation, 2 usage/validation
error.  All lengths and angles are radians / natural units.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .errors import CurvtriError, InvalidInput, TriangleValidationError
from .geometry import (
    Geometry,
    circumradius_functional,
    inradius_functional,
    j_invariants,
    radius_from_functional,
    s_func,
    validate_triangle,
)
from .inequalities import (
    HOLDS_FLOOR,
    lookup,
    normalized_gap,
    registry_builtin,
    search_counterexample,
    verify_inequality,
)
from .oracle import SamplerConfig, sample_sides
from .report import Report, render_min_gap_figure, render_sweep_figure
from .simplex import verify_simplex_euler

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

SIMPLEX_DIMENSIONS = (2, 3, 4, 5)
SIMPLEX_SAMPLE_CAP = 1000


def _geometry(value: str) -> Geometry:
    try:
        return Geometry.from_name(value)
    except InvalidInput as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=None, help="report path")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument(
        "--tolerance", type=float, default=None,
        help="override the relative violation floor (default 1e-12)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvtri",
        description="Constant-curvature triangle inequalities: compute, "
        "verify, and search for counterexamples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="radii and invariants of one triangle")
    p.add_argument("--geometry", type=_geometry, required=True)
    p.add_argument("sides", type=float, nargs=3, metavar="SIDE")

    p = sub.add_parser("sample", help="emit random valid triangles")
    p.add_argument("--geometry", type=_geometry, required=True)
    p.add_argument("--samples", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("verify", help="randomized verification suites")
    p.add_argument("--inequality", action="append", default=None)
    p.add_argument("--all", action="store_true")
    p.add_argument("--geometry", type=_geometry, default=None)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--figures", type=Path, default=None, help="PNG path")
    _add_common(p)

    p = sub.add_parser("search", help="counterexample search")
    p.add_argument("--inequality", required=True)
    p.add_argument("--geometry", type=_geometry, required=True)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--expect-violation", action="store_true")
    _add_common(p)

    p = sub.add_parser("simplex", help="n-dimensional Euler inequality")
    p.add_argument("--geometry", type=_geometry, default=Geometry.SPHERICAL)
    p.add_argument("--dimension", type=int, default=3)
    p.add_argument("--samples", type=int, default=SIMPLEX_SAMPLE_CAP)
    _add_common(p)

    p = sub.add_parser("plotdata", help="gap sweep over a triangle family")
    p.add_argument("--inequality", required=True)
    p.add_argument("--geometry", type=_geometry, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--lambda-min", type=float, default=0.02)
    p.add_argument("--lambda-max", type=float, default=1.98)
    p.add_argument("--figures", type=Path, default=None, help="PNG path")
    _add_common(p)

    return parser


# --- subcommand implementations --------------------------------------------


def cmd_compute(args) -> int:
    t = validate_triangle(args.geometry, *args.sides)
    rho_big = circumradius_functional(t).value
    rho_small = inradius_functional(t).value
    pair = j_invariants(t)
    try:
        big_r = radius_from_functional(t.kind, rho_big)
    except InvalidInput:
        big_r = None  # hyperbolic triangle without a circumscribed circle
    record = {
        "geometry": t.kind.name.lower(),
        "sides": list(t.sides),
        "s": [s_func(t.kind, x) for x in t.sides],
        "rho_R": rho_big,
        "rho_r": rho_small,
        "R": big_r,
        "r": radius_from_functional(t.kind, rho_small),
        "J": pair.j,
        "Jbar": pair.jbar,
    }
    print(json.dumps(record, sort_keys=True, indent=2))
    return EXIT_PASS


def cmd_sample(args) -> int:
    cfg = SamplerConfig(seed=args.seed, count=args.samples)
    sides = sample_sides(args.geometry, cfg, 0, args.samples)
    if args.format == "csv":
        lines = ["a,b,c"] + [f"{a!r},{b!r},{c!r}" for a, b, c in sides]
        text = "\n".join(lines) + "\n"
    else:
        text = (
            json.dumps(
                {
                    "geometry": args.geometry.name.lower(),
                    "seed": args.seed,
                    "triangles": sides.tolist(),
                },
                sort_keys=True,
                indent=2,
            )
            + "\n"
        )
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def _verify_plan(args):
    registry = registry_builtin()
    plan = []
    names = args.inequality or []
    if args.all:
        names = sorted(registry) + ["simplex-euler"]
    if not names:
        raise InvalidInput("pass --inequality NAME (repeatable) or --all")
    for name in names:
        if name == "simplex-euler":
            dims = (args.dimension,) if args.dimension else SIMPLEX_DIMENSIONS
            kinds = (
                (args.geometry,)
                if args.geometry
                else (Geometry.EUCLIDEAN, Geometry.SPHERICAL)
            )
            for kind in kinds:
                for dim in dims:
                    plan.append(("simplex", kind, dim))
        else:
            if args.dimension is not None:
                raise InvalidInput("--dimension applies to simplex-euler only")
            entry = lookup(name)
            kinds = (args.geometry,) if args.geometry else entry.geometries
            for kind in kinds:
                if kind not in entry.geometries:
                    raise InvalidInput(
                        f"{name} is not claimed in {kind.name.lower()} geometry"
                    )
                plan.append(("triangle", kind, name))
    return plan


def cmd_verify(args) -> int:
    start = time.perf_counter()
    floor = args.tolerance if args.tolerance is not None else HOLDS_FLOOR
    plan = _verify_plan(args)
    results = []
    for job in plan:
        if job[0] == "simplex":
            _, kind, dim = job
            count = min(args.samples, SIMPLEX_SAMPLE_CAP)
            results.append(
                verify_simplex_euler(kind, dim, count, args.seed, floor=floor).as_dict()
            )
        else:
            _, kind, name = job
            cfg = SamplerConfig(seed=args.seed, count=args.samples)
            results.append(verify_inequality(name, kind, cfg, floor=floor).as_dict())
    report = Report(
        config=_config_echo(args),
        results=results,
        wall_time=time.perf_counter() - start,
    )
    _emit_report(report, args)
    if args.figures:
        render_min_gap_figure(results, args.figures)
    return EXIT_PASS if report.overall_pass else EXIT_VIOLATION


def cmd_search(args) -> int:
    start = time.perf_counter()
    cfg = SamplerConfig(seed=args.seed, count=args.budget)
    record = search_counterexample(
        args.inequality, args.geometry, args.budget, cfg
    )
    found = record is not None
    result = {
        "inequality": args.inequality,
        "geometry": args.geometry.name.lower(),
        "budget": args.budget,
        "counterexample_found": found,
        "expected_violation": args.expect_violation,
        "pass": found == args.expect_violation,
    }
    report = Report(
        config=_config_echo(args),
        results=[result],
        counterexamples=[record.as_dict()] if found else [],
        wall_time=time.perf_counter() - start,
    )
    _emit_report(report, args)
    return EXIT_PASS if result["pass"] else EXIT_VIOLATION


def cmd_simplex(args) -> int:
    start = time.perf_counter()
    floor = args.tolerance if args.tolerance is not None else HOLDS_FLOOR
    result = verify_simplex_euler(
        args.geometry, args.dimension, args.samples, args.seed, floor=floor
    ).as_dict()
    report = Report(
        config=_config_echo(args),
        results=[result],
        wall_time=time.perf_counter() - start,
    )
    _emit_report(report, args)
    return EXIT_PASS if result["pass"] else EXIT_VIOLATION


def cmd_plotdata(args) -> int:
    entry = lookup(args.inequality)
    if args.geometry not in entry.geometries:
        raise InvalidInput(
            f"{args.inequality} is not claimed in {args.geometry.name.lower()} geometry"
        )
    lines = ["lambda,lhs,rhs,gap"]
    rows = []
    skipped = []
    for lam in np.linspace(args.lambda_min, args.lambda_max, args.steps):
        lam = float(lam)
        try:
            validate_triangle(args.geometry, 1.0, 1.0, float(lam))
        except TriangleValidationError:
            skipped.append(float(lam))
            continue
        a = np.asarray([1.0])
        evaluations = entry.evaluate(args.geometry, a, a, np.asarray([float(lam)]))
        gaps = [float(normalized_gap(lhs, rhs)[0]) for lhs, rhs in evaluations]
        worst = int(np.argmin(gaps))
        lhs, rhs = (float(x[0]) for x in evaluations[worst])
        rows.append((float(lam), lhs, rhs, lhs - rhs))
        lines.append(f"{lam!r},{lhs!r},{rhs!r},{lhs - rhs!r}")
    if skipped:
        lines.append(
            "# skipped lambda outside the triangle domain: "
            + " ".join(f"{lam:.6g}" for lam in skipped)
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if args.figures:
        render_sweep_figure(
            rows,
            f"{args.inequality} ({args.geometry.name.lower()})",
            args.figures,
        )
    return EXIT_PASS


def _config_echo(args) -> dict:
    config = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        if isinstance(value, Geometry):
            value = value.name.lower()
        elif isinstance(value, Path):
            value = str(value)
        config[key] = value
    return config


def _emit_report(report: Report, args) -> None:
    if args.out:
        report.write(args.out, args.format)
    else:
        text = report.to_json() if args.format == "json" else report.to_csv()
        sys.stdout.write(text)


_COMMANDS = {
    "compute": cmd_compute,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "search": cmd_search,
    "simplex": cmd_simplex,
    "plotdata": cmd_plotdata,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (TriangleValidationError, InvalidInput) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CurvtriError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
