"""Command-line entry point wiring the pipeline, reports, and query service."""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from .catalogue import load_catalogue
from .pipeline import STAGES, ConfigError, PipelineConfig, run_pipeline, stage_report_from_manifest
from .taxonomy import SeActivity


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse the flat `key = value` config format (# comments allowed)."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected `key = value`")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def _pipeline_config(args) -> PipelineConfig:
    file_values = load_config_file(args.config) if args.config else {}
    snapshots = list(args.snapshot or [])
    if not snapshots and "snapshot" in file_values:
        snapshots = [p.strip() for p in file_values["snapshot"].split(",") if p.strip()]
    output = args.out or file_values.get("output")
    if not output:
        raise ConfigError("an output directory is required (--out or `output =` in the config)")
    stages = STAGES[: STAGES.index(args.until) + 1]
    return PipelineConfig(
        snapshot_paths=snapshots,
        output_dir=output,
        taxonomy_path=args.taxonomy or file_values.get("taxonomy"),
        rules_path=args.rules or file_values.get("rules"),
        threshold=args.threshold if args.threshold is not None else float(file_values.get("threshold", 0.99)),
        provider=args.provider or file_values.get("provider", "mock"),
        prompt_version=args.prompt_version or file_values.get("prompt_version", "v1"),
        seed=args.seed if args.seed is not None else int(file_values.get("seed", 0)),
        stages=stages,
    )


def _add_pipeline_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snapshot", action="append", help="snapshot file (repeatable)")
    parser.add_argument("--out", help="output workspace directory")
    parser.add_argument("--config", help="config file (key = value lines)")
    parser.add_argument("--taxonomy", help="taxonomy file (defaults to the shipped one)")
    parser.add_argument("--rules", help="exclusion rules file (defaults to the shipped one)")
    parser.add_argument("--threshold", type=float, default=None, help="dedup cosine threshold")
    parser.add_argument("--provider", help="judge provider: 'mock' or an http(s) endpoint")
    parser.add_argument("--prompt-version", dest="prompt_version", help="judge prompt version")
    parser.add_argument("--seed", type=int, default=None)


def _run_stages(args, until: str) -> int:
    args.until = until
    config = _pipeline_config(args)
    catalogue = run_pipeline(config)
    report = stage_report_from_manifest(config.output_dir)
    for stage, count in report.counts:
        print(f"{stage:12} {count}")
    if catalogue is not None:
        print(f"catalogue: {Path(config.output_dir) / 'catalogue.json'} ({len(catalogue.entries)} entries)")
    return 0


def _hydrate_all(hub, arxiv, stubs, workers: int):
    if workers <= 1:
        return [hub.hydrate(stub, arxiv=arxiv) for stub in stubs]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: hub.hydrate(s, arxiv=arxiv), stubs))


def cmd_ingest(args) -> int:
    from .ingest import ArxivClient, HubClient, ReplayTransport, Snapshot, SnapshotSource, store_snapshot

    transport = ReplayTransport(args.fixture) if args.fixture else None
    hub = HubClient(transport=transport)
    arxiv = ArxivClient(transport=transport)
    since = datetime.fromisoformat(args.since.replace("Z", "+00:00")) if args.since else None
    stubs = hub.fetch_model_index(since=since, limit=args.limit)
    records = _hydrate_all(hub, arxiv, stubs, args.workers)
    snapshot = Snapshot(
        records=records,
        fetched_at=datetime.now(timezone.utc),
        source=SnapshotSource.LIVE_API,
    )
    store_snapshot(snapshot, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_update(args) -> int:
    from .ingest import (
        ArxivClient,
        HubClient,
        ReplayTransport,
        Snapshot,
        SnapshotSource,
        load_snapshot,
        merge_snapshots,
        store_snapshot,
    )

    base = load_snapshot(args.snapshot)
    transport = ReplayTransport(args.fixture) if args.fixture else None
    hub = HubClient(transport=transport)
    arxiv = ArxivClient(transport=transport)
    stubs = hub.fetch_model_index(since=base.fetched_at, limit=args.limit)
    records = _hydrate_all(hub, arxiv, stubs, args.workers)
    update = Snapshot(records=records, fetched_at=datetime.now(timezone.utc), source=SnapshotSource.LIVE_API)
    merged = merge_snapshots(base, update)
    out = args.out or args.snapshot
    store_snapshot(merged, out)
    print(f"merged {len(records)} new records; snapshot now has {len(merged.records)}")
    return 0


def cmd_stats(args) -> int:
    if args.catalogue:
        report = load_catalogue(args.catalogue).stage_report
    elif args.workspace:
        report = stage_report_from_manifest(args.workspace)
    else:
        raise ConfigError("stats needs --workspace or --catalogue")
    for stage, count in report.counts:
        print(f"{stage:12} {count}")
    for stage, details in report.details.items():
        print(f"  {stage}: {details}")
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    catalogue = load_catalogue(args.catalogue)
    written = write_report(catalogue, args.out)
    for path in written:
        print(path)
    return 0


def cmd_serve(args) -> int:
    from .service import serve_catalogue

    catalogue = load_catalogue(args.catalogue)
    print(f"serving {len(catalogue.entries)} entries on http://{args.host}:{args.port}")
    serve_catalogue(catalogue, host=args.host, port=args.port)
    return 0


def cmd_validate(args) -> int:
    from . import validation

    catalogue = load_catalogue(args.catalogue) if args.catalogue else None
    if args.action == "plan":
        print(f"{'activity':30} {'population':>10} {'sample':>7}")
        for activity in SeActivity:
            population = [e for e in catalogue.entries if activity in e.activities]
            if not population:
                continue
            plan = validation.make_plan(activity, len(population), confidence=args.confidence, margin=args.margin)
            print(f"{activity.value:30} {plan.population_n:>10} {plan.sample_n:>7}")
        return 0
    if args.action == "sample":
        activity = SeActivity.parse(args.activity)
        population = [e for e in catalogue.entries if activity in e.activities]
        if not population:
            print(f"no entries for {activity.value}", file=sys.stderr)
            return 1
        n = args.n or validation.sample_size(len(population), confidence=args.confidence, margin=args.margin)
        draw = validation.draw_sample(
            population, n, seed=args.seed, tasks_of=lambda e: e.tasks, overlap_fraction=args.overlap_fraction
        )
        annotations = validation.AnnotationSet()
        for entry in draw.items:
            annotations.entries.append((entry.model_id, activity, "", False, ""))
        validation.save_annotations(annotations, args.out)
        overlap_ids = sorted(e.model_id for e in draw.overlap)
        print(f"wrote {len(draw.items)} rows to {args.out}")
        if overlap_ids:
            print("double-annotate: " + ", ".join(overlap_ids))
        return 0
    if args.action == "kappa":
        annotations = validation.load_annotations(args.annotations)
        judgments = _load_judgments(args.judgments)
        human: list[bool] = []
        model: list[bool] = []
        for (model_id, activity), verdict in sorted(judgments.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
            verdicts = annotations.verdicts_for(model_id, activity)
            if not verdicts:
                continue
            consolidated = verdicts[0] if len(verdicts) == 1 else validation.majority_vote(verdicts)
            human.append(consolidated)
            model.append(verdict)
        if not human:
            print("no overlapping items between annotations and judgments", file=sys.stderr)
            return 1
        result = validation.cohen_kappa(human, model)
        print(json.dumps(result.to_json(), indent=1))
        return 0
    raise AssertionError(args.action)


def _load_judgments(path: str) -> dict[tuple[str, SeActivity], bool]:
    from .filters.judge import Judgment

    out: dict[tuple[str, SeActivity], bool] = {}
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip():
            continue
        j = Judgment.from_json(json.loads(line))
        out[(j.model_id, j.activity)] = j.verdict
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptmcat", description="Mine and catalogue SE-relevant hub models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fetch model records into a snapshot file")
    p.add_argument("--out", required=True)
    p.add_argument("--limit", type=int)
    p.add_argument("--since", help="ISO timestamp; only records created after it")
    p.add_argument("--fixture", help="replay transport fixture for offline runs")
    p.add_argument("--workers", type=int, default=1, help="parallel card fetchers")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("update", help="fetch records added since a snapshot and merge them")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--out", help="defaults to rewriting the input snapshot")
    p.add_argument("--limit", type=int)
    p.add_argument("--fixture")
    p.add_argument("--workers", type=int, default=1, help="parallel card fetchers")
    p.set_defaults(func=cmd_update)

    for name, until, help_text in [
        ("classify", "outlier", "run collection, preparation, search, and outlier filtering"),
        ("dedup", "dedup", "run the pipeline through near-duplicate clustering"),
        ("judge", "judge", "run the full pipeline and build the catalogue"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_pipeline_args(p)
        p.set_defaults(func=lambda a, u=until: _run_stages(a, u))

    p = sub.add_parser("stats", help="print per-stage record counts")
    p.add_argument("--workspace", help="pipeline output directory")
    p.add_argument("--catalogue", help="read the report from a catalogue file instead")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="write analytics documents and CSV exports")
    p.add_argument("--catalogue", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve the read-only catalogue query API")
    p.add_argument("--catalogue", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8032)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("validate", help="pilot-study tooling: plan, sample, kappa")
    p.add_argument("action", choices=["plan", "sample", "kappa"])
    p.add_argument("--catalogue")
    p.add_argument("--activity")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--overlap-fraction", dest="overlap_fraction", type=float, default=0.0)
    p.add_argument("--out")
    p.add_argument("--annotations")
    p.add_argument("--judgments")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
