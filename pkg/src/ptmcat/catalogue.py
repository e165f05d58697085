"""Catalogue of confirmed SE models: entry schema, stage report, serialization."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .ingest.records import CardStatus, DocStatus, parse_timestamp
from .taxonomy import SeActivity

FORMAT_VERSION = 1


@dataclass(frozen=True)
class DuplicateRole:
    kind: str  # "original" | "variant" | "unique"
    original_of: str | None = None  # set for variants

    @classmethod
    def unique(cls) -> "DuplicateRole":
        return cls(kind="unique")

    @classmethod
    def original(cls) -> "DuplicateRole":
        return cls(kind="original")

    @classmethod
    def variant(cls, original: str) -> "DuplicateRole":
        return cls(kind="variant", original_of=original)

    def to_json(self):
        return {"kind": self.kind, "original_of": self.original_of}


@dataclass
class CatalogueEntry:
    model_id: str
    created_at: datetime | None
    activities: set[SeActivity]
    tasks: set[str]
    ml_task: str | None = None
    license: str | None = None
    base_model: str | None = None
    declared_datasets: list[str] = field(default_factory=list)
    benchmarks: list[str] = field(default_factory=list)
    duplicate_role: DuplicateRole = field(default_factory=DuplicateRole.unique)
    doc_status: DocStatus | None = None
    tags: list[str] = field(default_factory=list)
    metadata_keys: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "created_at": self.created_at.isoformat() if self.created_at else None,
            "activities": sorted(a.value for a in self.activities),
            "tasks": sorted(self.tasks),
            "ml_task": self.ml_task,
            "license": self.license,
            "base_model": self.base_model,
            "declared_datasets": self.declared_datasets,
            "benchmarks": self.benchmarks,
            "duplicate_role": self.duplicate_role.to_json(),
            "doc_status": {
                "card": self.doc_status.card.value,
                "abstract_with_se": self.doc_status.abstract_with_se,
            }
            if self.doc_status
            else None,
            "tags": self.tags,
            "metadata_keys": self.metadata_keys,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CatalogueEntry":
        role = obj.get("duplicate_role") or {"kind": "unique"}
        status = obj.get("doc_status")
        created = obj.get("created_at")
        return cls(
            model_id=obj["model_id"],
            created_at=parse_timestamp(created) if created else None,
            activities={SeActivity(a) for a in obj.get("activities", [])},
            tasks=set(obj.get("tasks", [])),
            ml_task=obj.get("ml_task"),
            license=obj.get("license"),
            base_model=obj.get("base_model"),
            declared_datasets=list(obj.get("declared_datasets") or []),
            benchmarks=list(obj.get("benchmarks") or []),
            duplicate_role=DuplicateRole(kind=role["kind"], original_of=role.get("original_of")),
            doc_status=DocStatus(
                card=CardStatus(status["card"]),
                abstract_with_se=bool(status["abstract_with_se"]),
            )
            if status
            else None,
            tags=list(obj.get("tags") or []),
            metadata_keys=list(obj.get("metadata_keys") or []),
        )


@dataclass
class StageReport:
    """Record counts per pipeline stage, in pipeline order."""

    counts: list[tuple[str, int]] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def add(self, stage: str, count: int) -> None:
        self.counts.append((stage, count))

    def get(self, stage: str) -> int | None:
        for name, count in self.counts:
            if name == stage:
                return count
        return None

    def is_monotonic(self) -> bool:
        values = [c for _, c in self.counts]
        return all(a >= b for a, b in zip(values, values[1:]))

    def to_json(self) -> dict:
        return {"counts": [[s, c] for s, c in self.counts], "details": self.details}

    @classmethod
    def from_json(cls, obj: dict) -> "StageReport":
        return cls(counts=[(s, c) for s, c in obj.get("counts", [])], details=obj.get("details", {}))


@dataclass
class Catalogue:
    entries: list[CatalogueEntry]
    stage_report: StageReport
    fingerprint: str
    taxonomy_version: str = ""
    clusters: list[dict] = field(default_factory=list)  # original -> variants audit
    task_activities: dict[str, str] = field(default_factory=dict)  # task -> activity slug
    format_version: int = FORMAT_VERSION

    def to_json(self) -> dict:
        return {
            "format_version": self.format_version,
            "fingerprint": self.fingerprint,
            "taxonomy_version": self.taxonomy_version,
            "stage_report": self.stage_report.to_json(),
            "clusters": self.clusters,
            "task_activities": dict(sorted(self.task_activities.items())),
            "entries": [e.to_json() for e in sorted(self.entries, key=lambda e: e.model_id)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Catalogue":
        return cls(
            entries=[CatalogueEntry.from_json(e) for e in obj.get("entries", [])],
            stage_report=StageReport.from_json(obj.get("stage_report", {})),
            fingerprint=obj.get("fingerprint", ""),
            taxonomy_version=obj.get("taxonomy_version", ""),
            clusters=list(obj.get("clusters", [])),
            task_activities=dict(obj.get("task_activities", {})),
            format_version=obj.get("format_version", FORMAT_VERSION),
        )


def save_catalogue(catalogue: Catalogue, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(catalogue.to_json(), sort_keys=True, indent=1) + "\n", "utf-8"
    )


def load_catalogue(path: str | Path) -> Catalogue:
    return Catalogue.from_json(json.loads(Path(path).read_text("utf-8")))


def export_entries_csv(catalogue: Catalogue, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "model_id",
                "created_at",
                "activities",
                "tasks",
                "ml_task",
                "license",
                "base_model",
                "declared_datasets",
                "benchmarks",
                "duplicate_role",
                "tags",
            ]
        )
        for e in sorted(catalogue.entries, key=lambda e: e.model_id):
            writer.writerow(
                [
                    e.model_id,
                    e.created_at.isoformat() if e.created_at else "",
                    "|".join(sorted(a.value for a in e.activities)),
                    "|".join(sorted(e.tasks)),
                    e.ml_task or "",
                    e.license or "",
                    e.base_model or "",
                    "|".join(e.declared_datasets),
                    "|".join(e.benchmarks),
                    e.duplicate_role.kind,
                    "|".join(e.tags),
                ]
            )
