"""Machine-readable verification reports and their figure renderings.

Reports serialize deterministically (sorted keys, fixed float repr) so that
identical configurations produce byte-identical output up to the wall-time
fields.  Figures are optional companions written next to the delimited
output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1

TIMING_FIELDS = ("wall_time",)

CSV_COLUMNS = (
    "inequality",
    "geometry",
    "dimension",
    "samples",
    "violations",
    "min_gap",
    "pass",
)


@dataclass
class Report:
    config: dict
    results: list = field(default_factory=list)
    counterexamples: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def overall_pass(self) -> bool:
        return all(r.get("pass", False) for r in self.results)

    def as_dict(self) -> dict:
        from . import __version__

        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "config": self.config,
            "results": self.results,
            "counterexamples": self.counterexamples,
            "pass": self.overall_pass,
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for result in self.results:
            writer.writerow([result.get(col, "") for col in CSV_COLUMNS])
        return buf.getvalue()

    def write(self, path: str | Path, fmt: str = "json") -> None:
        text = self.to_json() if fmt == "json" else self.to_csv()
        Path(path).write_text(text)


def strip_timing(obj):
    """Recursively drop timing fields; used when comparing reports for
    determinism."""
    if isinstance(obj, dict):
        return {
            key: strip_timing(value)
            for key, value in obj.items()
            if key not in TIMING_FIELDS
        }
    if isinstance(obj, list):
        return [strip_timing(item) for item in obj]
    return obj


def _agg_figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_min_gap_figure(results: list, path: str | Path) -> None:
    """Bar chart of the minimum normalized gap per verified inequality."""
    plt = _agg_figure()
    labels = [
        f"{r['inequality']}\n{r['geometry']}"
        + (f" n={r['dimension']}" if "dimension" in r else "")
        for r in results
    ]
    gaps = [r["min_gap"] for r in results]
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(labels)), 4))
    colors = ["tab:blue" if g >= 0 else "tab:red" for g in gaps]
    ax.bar(range(len(labels)), gaps, color=colors)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, fontsize=7, rotation=45, ha="right")
    ax.set_ylabel("min normalized gap")
    ax.set_yscale("symlog", linthresh=1e-12)
    ax.axhline(0.0, color="black", linewidth=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep_figure(rows: list, title: str, path: str | Path) -> None:
    """Gap-versus-shape-parameter curve for a one-parameter triangle
    family; ``rows`` are (lambda, lhs, rhs, gap) tuples."""
    plt = _agg_figure()
    lam = [row[0] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lam, [row[1] for row in rows], label="lhs")
    ax.plot(lam, [row[2] for row in rows], label="rhs", linestyle="--")
    ax.plot(lam, [row[3] for row in rows], label="gap", linewidth=0.9)
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("lambda (c in the family a=1, b=1, c=lambda)")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
