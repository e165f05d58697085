"""Resumable classification pipeline: collection through judging.

Each stage checkpoints its output under `<output>/stages/` together with a
manifest keyed by the run's config fingerprint. Re-running skips completed
stages; changing any semantic input invalidates all checkpoints. With the
mock judge and a fixed seed the final catalogue is byte-identical across
runs and across interrupted-then-resumed runs.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .analytics import BenchmarkLexicon, extract_benchmark_tables
from .catalogue import Catalogue, CatalogueEntry, DuplicateRole, StageReport, save_catalogue
from .filters.dedup import DEFAULT_THRESHOLD, cluster_duplicates, vectorize_corpus
from .filters.exclusion import apply_exclusion_rules, load_rules, record_source_texts
from .filters.judge import JudgmentCache, MockJudgeProvider, PromptLibrary, judge_relevance
from .ingest.records import (
    CardStatus,
    DocStatus,
    ModelRecord,
    Snapshot,
    SnapshotSource,
    documentation_status,
    load_snapshot,
    store_snapshot,
)
from .matcher import TaskHit, find_hits
from .taxonomy import Taxonomy, default_taxonomy_path, load_taxonomy
from .textprep import Normalizer, SourceField

STAGES = ["collection", "preparation", "search", "outlier", "dedup", "judge"]


class ConfigError(Exception):
    pass


class StageFailure(Exception):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    snapshot_paths: list[str]
    output_dir: str
    taxonomy_path: str | None = None
    rules_path: str | None = None
    threshold: float = DEFAULT_THRESHOLD
    provider: str = "mock"
    prompt_version: str = "v1"
    seed: int = 0
    stages: list[str] = field(default_factory=lambda: list(STAGES))

    def validate(self) -> None:
        if not self.snapshot_paths:
            raise ConfigError("at least one snapshot path is required")
        for p in self.snapshot_paths:
            if not Path(p).is_file():
                raise ConfigError(f"snapshot not found: {p}")
        if not (0.0 < self.threshold <= 1.0):
            raise ConfigError(f"threshold must be in (0, 1], got {self.threshold}")
        if not (0 <= self.seed < 2**63):
            raise ConfigError(f"seed must fit in 63 bits, got {self.seed}")
        if self.stages != STAGES[: len(self.stages)]:
            raise ConfigError(f"stages must be a prefix of {STAGES}, got {self.stages}")

    def fingerprint(self) -> str:
        """Content hash over semantic inputs only (paths excluded)."""
        payload = {
            "snapshots": [_file_sha256(p) for p in self.snapshot_paths],
            "taxonomy": _file_sha256(self.taxonomy_path or default_taxonomy_path()),
            "rules": _file_sha256(self.rules_path) if self.rules_path else "builtin",
            "threshold": self.threshold,
            "provider": self.provider,
            "prompt_version": self.prompt_version,
            "seed": self.seed,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, "utf-8")
    os.replace(tmp, path)


class _Workspace:
    """Stage checkpoint files + completion manifest under the output dir."""

    def __init__(self, output_dir: str | Path, fingerprint: str):
        self.root = Path(output_dir)
        self.stages_dir = self.root / "stages"
        self.stages_dir.mkdir(parents=True, exist_ok=True)
        self.fingerprint = fingerprint
        self.manifest_path = self.root / "stages" / "manifest.json"
        self.manifest = {"fingerprint": fingerprint, "stages": {}}
        if self.manifest_path.exists():
            stored = json.loads(self.manifest_path.read_text("utf-8"))
            if stored.get("fingerprint") == fingerprint:
                self.manifest = stored

    def is_done(self, stage: str) -> bool:
        return self.manifest["stages"].get(stage, {}).get("done", False)

    def mark_done(self, stage: str, count: int, **details) -> None:
        self.manifest["stages"][stage] = {"done": True, "count": count, **details}
        _atomic_write(self.manifest_path, json.dumps(self.manifest, sort_keys=True, indent=1))

    def stage_count(self, stage: str) -> int:
        return self.manifest["stages"][stage]["count"]

    def stage_details(self, stage: str) -> dict:
        info = dict(self.manifest["stages"].get(stage, {}))
        info.pop("done", None)
        info.pop("count", None)
        return info

    def path(self, name: str) -> Path:
        return self.stages_dir / name


def run_pipeline(config: PipelineConfig) -> Catalogue | None:
    """Execute the configured stage prefix; returns the catalogue when judging ran."""
    config.validate()
    fingerprint = config.fingerprint()
    ws = _Workspace(config.output_dir, fingerprint)
    taxonomy = load_taxonomy(config.taxonomy_path or default_taxonomy_path())
    normalizer = Normalizer()
    runner = _Runner(config, ws, taxonomy, normalizer)
    for stage in config.stages:
        if ws.is_done(stage) and not (stage == "judge" and not (ws.root / "catalogue.json").exists()):
            continue
        try:
            getattr(runner, f"run_{stage}")()
        except StageFailure:
            raise
        except Exception as exc:
            raise StageFailure(stage, exc) from exc
    if "judge" in config.stages:
        from .catalogue import load_catalogue

        return load_catalogue(ws.root / "catalogue.json")
    return None


def stage_report_from_manifest(ws_root: str | Path) -> StageReport:
    manifest = json.loads((Path(ws_root) / "stages" / "manifest.json").read_text("utf-8"))
    report = StageReport()
    for stage in STAGES:
        info = manifest["stages"].get(stage)
        if info and info.get("done"):
            report.add(stage, info["count"])
            extra = {k: v for k, v in info.items() if k not in ("done", "count")}
            if extra:
                report.details[stage] = extra
    return report


class _Runner:
    def __init__(self, config: PipelineConfig, ws: _Workspace, taxonomy: Taxonomy, normalizer: Normalizer):
        self.config = config
        self.ws = ws
        self.taxonomy = taxonomy
        self.normalizer = normalizer
        self.rules = load_rules(config.rules_path)
        self.lexicon = BenchmarkLexicon()

    # -- stage: collection ------------------------------------------------
    def run_collection(self) -> None:
        merged: dict[str, ModelRecord] = {}
        fetched_at = None
        for path in self.config.snapshot_paths:
            snapshot = load_snapshot(path)
            fetched_at = snapshot.fetched_at if fetched_at is None else max(fetched_at, snapshot.fetched_at)
            for record in snapshot.records:
                merged.pop(record.model_id, None)
                merged[record.model_id] = record
        records = [merged[k] for k in sorted(merged)]
        out = Snapshot(records=records, fetched_at=fetched_at, source=SnapshotSource.LOCAL_FILE)
        tmp = self.ws.path("01_collection.jsonl.tmp")
        store_snapshot(out, tmp)
        os.replace(tmp, self.ws.path("01_collection.jsonl"))
        self.ws.mark_done("collection", len(records))

    def _records(self) -> list[ModelRecord]:
        return load_snapshot(self.ws.path("01_collection.jsonl")).records

    # -- stage: preparation ------------------------------------------------
    def run_preparation(self) -> None:
        available: dict[str, list[str]] = {}
        for record in self._records():
            fields = [f.value for f, text in record_source_texts(record).items() if text.strip()]
            if fields:
                available[record.model_id] = sorted(fields)
        _atomic_write(self.ws.path("02_preparation.json"), json.dumps(available, sort_keys=True, indent=1))
        self.ws.mark_done("preparation", len(available))

    # -- stage: search ------------------------------------------------------
    def run_search(self) -> None:
        all_hits: list[dict] = []
        statuses: dict[str, dict] = {}
        hit_models: set[str] = set()
        for record in self._records():
            hits_by_source: dict[SourceField, list[TaskHit]] = {}
            for source_field, text in record_source_texts(record).items():
                if not text.strip():
                    continue
                doc = self.normalizer.prepare(text, source_field)
                hits = find_hits(doc, self.taxonomy, record.model_id)
                if hits:
                    hits_by_source[source_field] = hits
            status = documentation_status(record, hits_by_source)
            statuses[record.model_id] = {
                "card": status.card.value,
                "abstract_with_se": status.abstract_with_se,
            }
            for source_hits in hits_by_source.values():
                hit_models.add(record.model_id)
                for h in source_hits:
                    all_hits.append(_hit_to_json(h))
        all_hits.sort(key=lambda h: (h["model_id"], h["source"], h["token_span"]))
        _atomic_write(self.ws.path("03_search_hits.jsonl"), "".join(json.dumps(h, sort_keys=True) + "\n" for h in all_hits))
        _atomic_write(self.ws.path("03_doc_status.json"), json.dumps(statuses, sort_keys=True, indent=1))
        self.ws.mark_done("search", len(hit_models), hit_count=len(all_hits))

    def _load_hits(self, name: str) -> dict[str, list[TaskHit]]:
        by_model: dict[str, list[TaskHit]] = {}
        path = self.ws.path(name)
        for line in path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            hit = _hit_from_json(json.loads(line), self.taxonomy)
            by_model.setdefault(hit.model_id, []).append(hit)
        return by_model

    # -- stage: outlier ------------------------------------------------------
    def run_outlier(self) -> None:
        hits_by_model = self._load_hits("03_search_hits.jsonl")
        kept_lines: list[str] = []
        removal_lines: list[str] = []
        survivors: set[str] = set()
        removed_hits = 0
        for record in self._records():
            hits = hits_by_model.get(record.model_id)
            if not hits:
                continue
            outcome = apply_exclusion_rules(record, hits, rules=self.rules)
            removed_hits += len(outcome.removals)
            for removal in outcome.removals:
                removal_lines.append(
                    json.dumps(
                        {**_hit_to_json(removal.hit), "rule_ids": list(removal.rule_ids)},
                        sort_keys=True,
                    )
                    + "\n"
                )
            if outcome.kept:
                survivors.add(record.model_id)
                kept_lines.extend(json.dumps(_hit_to_json(h), sort_keys=True) + "\n" for h in outcome.kept)
        _atomic_write(self.ws.path("04_outlier_hits.jsonl"), "".join(kept_lines))
        _atomic_write(self.ws.path("04_outlier_removals.jsonl"), "".join(removal_lines))
        excluded_models = len(hits_by_model) - len(survivors)
        self.ws.mark_done(
            "outlier", len(survivors), removed_hits=removed_hits, excluded_models=excluded_models
        )

    # -- stage: dedup ------------------------------------------------------
    def run_dedup(self) -> None:
        survivors = set(self._load_hits("04_outlier_hits.jsonl"))
        records = [r for r in self._records() if r.model_id in survivors]
        cards = [(r.model_id, r.card_body or "") for r in records]
        clusters = []
        if any((body or "").strip() for _, body in cards):
            vectors = vectorize_corpus(cards)
            clusters = cluster_duplicates(vectors, records, threshold=self.config.threshold)
        payload = [
            {"original": c.original, "variants": [[m, s] for m, s in c.variants], "basis": c.basis}
            for c in clusters
        ]
        _atomic_write(self.ws.path("05_dedup_clusters.json"), json.dumps(payload, sort_keys=True, indent=1))
        variant_ids = {m for c in clusters for m, _ in c.variants}
        self.ws.mark_done(
            "dedup",
            len(records) - len(variant_ids),
            variants=len(variant_ids),
            clusters=len(clusters),
        )

    # -- stage: judge ------------------------------------------------------
    def run_judge(self) -> None:
        hits_by_model = self._load_hits("04_outlier_hits.jsonl")
        clusters = json.loads(self.ws.path("05_dedup_clusters.json").read_text("utf-8"))
        variant_of = {m: c["original"] for c in clusters for m, _ in c["variants"]}
        originals = {c["original"] for c in clusters}
        statuses = json.loads(self.ws.path("03_doc_status.json").read_text("utf-8"))

        provider = self._make_provider()
        prompts = PromptLibrary(version=self.config.prompt_version)
        cache = JudgmentCache(self.ws.path("06_judgments.jsonl"))

        entries: list[CatalogueEntry] = []
        rejected = 0
        for record in sorted(self._records(), key=lambda r: r.model_id):
            hits = hits_by_model.get(record.model_id)
            if not hits or record.model_id in variant_of:
                continue
            tasks_by_activity: dict = {}
            for hit in hits:
                tasks_by_activity.setdefault(hit.task.activity, set()).add(hit.task.name)
            confirmed = {}
            for activity in sorted(tasks_by_activity, key=lambda a: a.value):
                judgment = judge_relevance(
                    record,
                    activity,
                    provider,
                    prompts,
                    cache=cache,
                    matched_tasks=sorted(tasks_by_activity[activity]),
                )
                if judgment.verdict:
                    confirmed[activity] = tasks_by_activity[activity]
            if not confirmed:
                rejected += 1
                continue
            status = statuses.get(record.model_id)
            entries.append(
                CatalogueEntry(
                    model_id=record.model_id,
                    created_at=record.created_at,
                    activities=set(confirmed),
                    tasks={t for tasks in confirmed.values() for t in tasks},
                    ml_task=record.ml_task,
                    license=record.license,
                    base_model=record.base_model,
                    declared_datasets=list(record.declared_datasets),
                    benchmarks=extract_benchmark_tables(record.card_body, self.lexicon),
                    duplicate_role=DuplicateRole.original()
                    if record.model_id in originals
                    else DuplicateRole.unique(),
                    doc_status=DocStatus(
                        card=CardStatus(status["card"]),
                        abstract_with_se=status["abstract_with_se"],
                    )
                    if status
                    else None,
                    tags=list(record.tags),
                    metadata_keys=sorted(record.metadata) if record.metadata else [],
                )
            )
        self.ws.mark_done("judge", len(entries), rejected=rejected)

        present_tasks = {t for e in entries for t in e.tasks}
        task_activities = {
            t.name: t.activity.value for t in self.taxonomy.tasks if t.name in present_tasks
        }
        report = stage_report_from_manifest(self.ws.root)
        catalogue = Catalogue(
            entries=entries,
            stage_report=report,
            fingerprint=self.ws.fingerprint,
            taxonomy_version=self.taxonomy.version,
            clusters=clusters,
            task_activities=task_activities,
        )
        save_catalogue(catalogue, self.ws.root / "catalogue.json")

    def _make_provider(self):
        spec = self.config.provider
        if spec == "mock":
            return MockJudgeProvider(seed=self.config.seed)
        if spec.startswith("http:") or spec.startswith("https:"):
            from .filters.judge import HttpJudgeProvider

            return HttpJudgeProvider(endpoint=spec)
        raise ConfigError(f"unknown judge provider {spec!r} (use 'mock' or an http(s) endpoint)")


def _hit_to_json(hit: TaskHit) -> dict:
    return {
        "model_id": hit.model_id,
        "task": hit.task.name,
        "activity": hit.task.activity.value,
        "source": hit.source_field.value,
        "token_span": list(hit.token_span),
        "char_span": list(hit.char_span),
    }


def _hit_from_json(obj: dict, taxonomy: Taxonomy) -> TaskHit:
    task = taxonomy.find(obj["task"])
    if task is None:
        raise ValueError(f"hit references unknown task {obj['task']!r}")
    return TaskHit(
        model_id=obj["model_id"],
        task=task,
        source_field=SourceField(obj["source"]),
        token_span=tuple(obj["token_span"]),
        char_span=tuple(obj["char_span"]),
    )
