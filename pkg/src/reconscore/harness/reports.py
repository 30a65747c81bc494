"""Deterministic experiment reports: full-precision JSON plus a publication-style
markdown table (2 decimal places). Identical inputs yield identical bytes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ExperimentReport:
    experiment_id: str
    config: dict
    columns: list[str]              # aggregate table column order
    aggregates: list[dict]          # one dict per aggregate row
    rows: list[dict] = field(default_factory=list)  # per-instance rows
    notes: list[str] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "config": self.config,
            "columns": self.columns,
            "aggregates": self.aggregates,
            "rows": self.rows,
            "notes": self.notes,
        }


def _format_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def render_markdown(report: ExperimentReport) -> str:
    """Aligned markdown table over the aggregate rows."""
    cols = report.columns
    grid = [[_format_cell(row.get(c)) for c in cols] for row in report.aggregates]
    widths = [max([len(c)] + [len(r[i]) for r in grid]) for i, c in enumerate(cols)]

    def line(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    out = [f"# {report.experiment_id}", ""]
    out.append(line(cols))
    out.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
    for row in grid:
        out.append(line(row))
    if report.notes:
        out.append("")
        for note in report.notes:
            out.append(f"- {note}")
    return "\n".join(out) + "\n"


def emit_report(report: ExperimentReport, out_dir: str | Path,
                formats: tuple[str, ...] = ("json", "md")) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        path = out_dir / f"{report.experiment_id}.json"
        path.write_text(json.dumps(report.to_json_obj(), sort_keys=True,
                                   indent=2, ensure_ascii=False) + "\n",
                        encoding="utf-8")
        written.append(path)
    if "md" in formats:
        path = out_dir / f"{report.experiment_id}.md"
        path.write_text(render_markdown(report), encoding="utf-8")
        written.append(path)
    return written
