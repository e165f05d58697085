"""Write analytics documents (JSON) and CSV exports for a catalogue."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .analytics import attribute_stats, classification_stats, quarterly_series
from .catalogue import Catalogue, export_entries_csv
from .taxonomy import SeActivity


def write_report(catalogue: Catalogue, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = catalogue.entries
    quarterly = quarterly_series(entries)
    classification = classification_stats(entries, catalogue.task_activities)
    attributes = attribute_stats(entries)

    written: list[Path] = []

    def emit_json(name: str, payload: dict):
        path = out / name
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", "utf-8")
        written.append(path)

    emit_json("quarterly.json", quarterly.to_json())
    emit_json("classification.json", classification.to_json())
    emit_json("attributes.json", attributes.to_json())
    emit_json("stage_report.json", catalogue.stage_report.to_json())

    def emit_csv(name: str, header: list[str], rows: list[list]):
        path = out / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        written.append(path)

    emit_csv(
        "quarterly.csv",
        ["quarter", "total"] + list(quarterly.by_activity),
        [
            [q, quarterly.totals[i]] + [quarterly.by_activity[a][i] for a in quarterly.by_activity]
            for i, q in enumerate(quarterly.quarters)
        ],
    )
    emit_csv(
        "task_counts.csv",
        ["task", "activity", "entries"],
        [[t, classification.task_activity.get(t, ""), c] for t, c in classification.task_counts.items()],
    )
    emit_csv(
        "activity_counts.csv",
        ["activity", "entries"],
        [[a, c] for a, c in classification.activity_counts.items()],
    )
    names = [a.value for a in SeActivity]
    emit_csv(
        "cooccurrence.csv",
        ["activity"] + names,
        [[i] + [classification.cooccurrence[i][j] for j in names] for i in names],
    )
    emit_csv(
        "flow_edges.csv",
        ["ml_task", "activity", "entries"],
        [list(edge) for edge in classification.flow_edges],
    )
    emit_csv(
        "licenses.csv",
        ["activity", "license", "entries"],
        [
            [activity, lic, count]
            for activity, counts in attributes.license_counts.items()
            for lic, count in counts.items()
        ],
    )
    emit_csv(
        "datasets.csv",
        ["activity", "dataset", "entries", "shared_with"],
        [
            [activity, row["name"], row["count"], "|".join(row["shared_with"])]
            for activity, rows in attributes.top_datasets.items()
            for row in rows
        ],
    )
    emit_csv(
        "base_models.csv",
        ["base_model", "total"],
        [[base, info["total"]] for base, info in attributes.base_model_series.items()],
    )
    emit_csv(
        "benchmarks.csv",
        ["benchmark", "entries"],
        [[b, c] for b, c in attributes.benchmark_counts.items()],
    )
    entries_csv = out / "entries.csv"
    export_entries_csv(catalogue, entries_csv)
    written.append(entries_csv)
    return written
