import json
from datetime import datetime, timezone

import pytest

from ptmcat.cli import load_config_file, main
from ptmcat.ingest.records import ModelRecord, Snapshot, SnapshotSource, load_snapshot, store_snapshot
from ptmcat.pipeline import ConfigError
from ptmcat.validation import SampleTooSmall

from conftest import FIXTURES

REPLAY = str(FIXTURES / "hub_replay.json")


def test_config_file_parsing(tmp_path):
    path = tmp_path / "pipeline.conf"
    path.write_text("# demo\nsnapshot = a.jsonl, b.jsonl\noutput = out\nthreshold = 0.98\nseed = 7\n")
    values = load_config_file(path)
    assert values == {"snapshot": "a.jsonl, b.jsonl", "output": "out", "threshold": "0.98", "seed": "7"}


def test_config_file_rejects_bad_lines(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("this is not a key value line\n")
    with pytest.raises(ConfigError):
        load_config_file(path)


def test_judge_command_end_to_end(snapshot_path, tmp_path, capsys):
    out = tmp_path / "ws"
    rc = main(["judge", "--snapshot", str(snapshot_path), "--out", str(out), "--provider", "mock", "--seed", "42"])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "judge        4" in printed
    assert (out / "catalogue.json").exists()


def test_classify_stops_at_outlier(snapshot_path, tmp_path, capsys):
    out = tmp_path / "ws"
    assert main(["classify", "--snapshot", str(snapshot_path), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "outlier      6" in printed
    assert not (out / "catalogue.json").exists()


def test_config_file_with_flag_override(snapshot_path, tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text(f"snapshot = {snapshot_path}\noutput = {tmp_path / 'from-file'}\nseed = 42\n")
    out = tmp_path / "cli-wins"
    assert main(["judge", "--config", str(conf), "--out", str(out)]) == 0
    assert (out / "catalogue.json").exists()
    assert not (tmp_path / "from-file").exists()


def test_stats_command(snapshot_path, tmp_path, capsys):
    out = tmp_path / "ws"
    main(["judge", "--snapshot", str(snapshot_path), "--out", str(out), "--seed", "42"])
    capsys.readouterr()
    assert main(["stats", "--workspace", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "collection   50" in printed
    assert "judge        4" in printed
    assert main(["stats", "--catalogue", str(out / "catalogue.json")]) == 0


def test_report_command(snapshot_path, tmp_path, capsys):
    out = tmp_path / "ws"
    main(["judge", "--snapshot", str(snapshot_path), "--out", str(out), "--seed", "42"])
    report_dir = tmp_path / "report"
    assert main(["report", "--catalogue", str(out / "catalogue.json"), "--out", str(report_dir)]) == 0
    names = {p.name for p in report_dir.iterdir()}
    assert {
        "quarterly.json",
        "classification.json",
        "attributes.json",
        "quarterly.csv",
        "task_counts.csv",
        "cooccurrence.csv",
        "licenses.csv",
        "entries.csv",
    } <= names
    rows = (report_dir / "entries.csv").read_text().splitlines()
    assert len(rows) == 5  # header + 4 entries
    task_rows = (report_dir / "task_counts.csv").read_text().splitlines()
    assert "code review,software-maintenance,1" in task_rows


def test_ingest_command_with_replay(tmp_path, capsys):
    out = tmp_path / "snap.jsonl"
    assert main(["ingest", "--out", str(out), "--fixture", REPLAY]) == 0
    snap = load_snapshot(out)
    assert snap.ids() == {"acme/demo-coder", "acme/plain-vision", "acme/old-model"}
    coder = next(r for r in snap.records if r.model_id == "acme/demo-coder")
    assert coder.card_body.startswith("# Demo Coder")
    assert coder.abstracts and coder.abstracts[0][0] == "2106.09685"
    vision = next(r for r in snap.records if r.model_id == "acme/plain-vision")
    assert vision.card_body is None
    old = next(r for r in snap.records if r.model_id == "acme/old-model")
    assert old.card_body == ""


def test_ingest_parallel_workers_same_result(tmp_path, capsys):
    serial = tmp_path / "serial.jsonl"
    parallel = tmp_path / "parallel.jsonl"
    assert main(["ingest", "--out", str(serial), "--fixture", REPLAY]) == 0
    assert main(["ingest", "--out", str(parallel), "--fixture", REPLAY, "--workers", "4"]) == 0
    strip_header = lambda p: [l for l in p.read_text().splitlines() if "_snapshot" not in l]
    assert strip_header(serial) == strip_header(parallel)


def test_update_command_merges_since(tmp_path, capsys):
    base = Snapshot(
        records=[ModelRecord(model_id="existing/one", created_at=datetime(2025, 1, 1, tzinfo=timezone.utc))],
        fetched_at=datetime(2025, 5, 30, tzinfo=timezone.utc),
        source=SnapshotSource.LOCAL_FILE,
    )
    path = tmp_path / "base.jsonl"
    store_snapshot(base, path)
    assert main(["update", "--snapshot", str(path), "--fixture", REPLAY]) == 0
    merged = load_snapshot(path)
    # only the record created after the base fetched_at is pulled in
    assert merged.ids() == {"existing/one", "acme/demo-coder"}
    assert merged.fetched_at > base.fetched_at


def test_validate_plan_and_sample_and_kappa(snapshot_path, tmp_path, capsys):
    out = tmp_path / "ws"
    main(["judge", "--snapshot", str(snapshot_path), "--out", str(out), "--seed", "42"])
    catalogue = str(out / "catalogue.json")
    capsys.readouterr()

    assert main(["validate", "plan", "--catalogue", catalogue]) == 0
    printed = capsys.readouterr().out
    assert "software-implementation" in printed
    assert " 3 " in printed  # population of 3 -> sample of 3

    sample_csv = tmp_path / "sample.csv"
    # 3 implementation entries carry 4 distinct tasks: coverage is best-effort
    with pytest.warns(SampleTooSmall):
        rc = main(
            [
                "validate",
                "sample",
                "--catalogue",
                catalogue,
                "--activity",
                "software-implementation",
                "--seed",
                "5",
                "--out",
                str(sample_csv),
            ]
        )
    assert rc == 0
    rows = sample_csv.read_text().splitlines()
    assert rows[0] == "model_id,activity,annotator_id,verdict,reasoning"
    assert len(rows) == 4  # header + all three implementation entries
    capsys.readouterr()

    annotations = tmp_path / "ann.csv"
    annotations.write_text(
        "model_id,activity,annotator_id,verdict,reasoning\n"
        "fix/m45,software-implementation,ann1,true,clearly implementation\n"
        "fix/m47,software-implementation,ann1,true,completion model\n"
        "fix/m48,software-implementation,ann1,true,codegen for fixes\n"
        "fix/m49,software-quality-assurance,ann1,false,speaker verification\n"
    )
    assert (
        main(
            [
                "validate",
                "kappa",
                "--annotations",
                str(annotations),
                "--judgments",
                str(out / "stages" / "06_judgments.jsonl"),
            ]
        )
        == 0
    )
    result = json.loads(capsys.readouterr().out)
    assert result["kappa"] == 1.0
    assert result["band"] == "Perfect"
    assert result["n_items"] == 4


def test_missing_output_is_config_error(snapshot_path, capsys):
    assert main(["judge", "--snapshot", str(snapshot_path)]) == 2
    assert "output" in capsys.readouterr().err
