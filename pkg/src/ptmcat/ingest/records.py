"""Model records, documentation status, and reproducible snapshots."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from ..matcher import TaskHit
from ..textprep import SourceField


class CardStatus(Enum):
    NOT_AVAILABLE = "card_not_available"
    AVAILABLE_EMPTY = "card_available_empty"
    AVAILABLE_NO_SE = "card_available_no_se"
    AVAILABLE_WITH_SE = "card_available_with_se"


@dataclass(frozen=True)
class DocStatus:
    card: CardStatus
    abstract_with_se: bool


class SnapshotSource(Enum):
    LIVE_API = "live_api"
    LOCAL_FILE = "local_file"


@dataclass
class ModelRecord:
    """One hub model: identity, card, metadata, and linked abstracts."""

    model_id: str
    created_at: datetime | None = None
    card_body: str | None = None
    metadata: dict | None = None
    tags: list[str] = field(default_factory=list)
    ml_task: str | None = None
    license: str | None = None
    base_model: str | None = None
    declared_datasets: list[str] = field(default_factory=list)
    arxiv_ids: list[str] = field(default_factory=list)
    abstracts: list[tuple[str, str]] = field(default_factory=list)
    downloads: int | None = None

    def __post_init__(self):
        if self.downloads is not None and self.downloads < 0:
            raise ValueError(f"{self.model_id}: downloads must be >= 0")
        known = set(self.arxiv_ids)
        for arxiv_id, _ in self.abstracts:
            if arxiv_id not in known:
                raise ValueError(f"{self.model_id}: abstract for unlisted arxiv id {arxiv_id}")

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "created_at": self.created_at.isoformat() if self.created_at else None,
            "card_body": self.card_body,
            "metadata": self.metadata,
            "tags": self.tags,
            "ml_task": self.ml_task,
            "license": self.license,
            "base_model": self.base_model,
            "declared_datasets": self.declared_datasets,
            "arxiv_ids": self.arxiv_ids,
            "abstracts": [[a, t] for a, t in self.abstracts],
            "downloads": self.downloads,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ModelRecord":
        created = obj.get("created_at")
        return cls(
            model_id=obj["model_id"],
            created_at=parse_timestamp(created) if created else None,
            card_body=obj.get("card_body"),
            metadata=obj.get("metadata"),
            tags=list(obj.get("tags") or []),
            ml_task=obj.get("ml_task"),
            license=obj.get("license"),
            base_model=obj.get("base_model"),
            declared_datasets=list(obj.get("declared_datasets") or []),
            arxiv_ids=list(obj.get("arxiv_ids") or []),
            abstracts=[(a, t) for a, t in (obj.get("abstracts") or [])],
            downloads=obj.get("downloads"),
        )


@dataclass
class Snapshot:
    records: list[ModelRecord]
    fetched_at: datetime
    source: SnapshotSource

    def ids(self) -> set[str]:
        return {r.model_id for r in self.records}


def parse_timestamp(value: str) -> datetime:
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def documentation_status(record: ModelRecord, hits_by_source: dict[SourceField, list[TaskHit]]) -> DocStatus:
    """Classify the record's card into the four-way partition.

    Uses raw (pre-exclusion) hits: the partition describes what the search
    stage found, before outlier filtering.
    """
    card_hits = bool(hits_by_source.get(SourceField.CARD_BODY)) or bool(
        hits_by_source.get(SourceField.CARD_METADATA)
    )
    abstract_hits = bool(hits_by_source.get(SourceField.ABSTRACT))
    if record.card_body is None:
        card = CardStatus.NOT_AVAILABLE
    elif not record.card_body.strip() and not record.metadata:
        card = CardStatus.AVAILABLE_EMPTY
    elif card_hits:
        card = CardStatus.AVAILABLE_WITH_SE
    else:
        card = CardStatus.AVAILABLE_NO_SE
    return DocStatus(card=card, abstract_with_se=abstract_hits)


def store_snapshot(snapshot: Snapshot, path: str | Path) -> None:
    """Write line-delimited records with a leading snapshot header line."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "_snapshot": {
                "fetched_at": snapshot.fetched_at.isoformat(),
                "source": snapshot.source.value,
            }
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for record in snapshot.records:
            fh.write(json.dumps(record.to_json(), sort_keys=True) + "\n")


def load_snapshot(path: str | Path) -> Snapshot:
    """Load a snapshot; duplicate model_ids keep the last occurrence.

    Keeping the last occurrence makes `cat old new > merged` a valid update:
    refetched records override stale ones.
    """
    fetched_at = datetime.fromtimestamp(0, tz=timezone.utc)
    source = SnapshotSource.LOCAL_FILE
    by_id: dict[str, ModelRecord] = {}
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if "_snapshot" in obj:
            header = obj["_snapshot"]
            fetched_at = parse_timestamp(header["fetched_at"])
            source = SnapshotSource(header["source"])
            continue
        record = ModelRecord.from_json(obj)
        by_id.pop(record.model_id, None)
        by_id[record.model_id] = record
    return Snapshot(records=list(by_id.values()), fetched_at=fetched_at, source=source)


def merge_snapshots(base: Snapshot, update: Snapshot) -> Snapshot:
    """Merge an incremental fetch into an existing snapshot (update wins on id)."""
    by_id = {r.model_id: r for r in base.records}
    for record in update.records:
        by_id.pop(record.model_id, None)
        by_id[record.model_id] = record
    fetched_at = max(base.fetched_at, update.fetched_at)
    return Snapshot(records=list(by_id.values()), fetched_at=fetched_at, source=update.source)
