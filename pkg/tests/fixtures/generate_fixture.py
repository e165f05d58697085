"""Regenerate snapshot_50.jsonl, the hand-traced 50-card pipeline fixture.

Run from the repo root:  python3 tests/fixtures/generate_fixture.py

Intended trace through the pipeline (asserted by the tests):
  collection 50 -> preparation 44 -> search 10 -> outlier 6 -> dedup 5 -> judge 4
Card status partition: 5 not available / 3 empty / 33 no-SE / 9 with-SE;
exactly one record is SE-relevant through its arXiv abstract alone.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

from ptmcat.filters.dedup import cosine, vectorize_corpus
from ptmcat.ingest.records import ModelRecord, Snapshot, SnapshotSource, store_snapshot

OUT = Path(__file__).parent / "snapshot_50.jsonl"

# shared template for the near-duplicate pair; long enough that one differing
# model name keeps cosine >= 0.99
_DUP_TEMPLATE = """# {name}

This repository hosts a decoder-only transformer for code generation in
Python. The model was trained on a large corpus of permissively licensed
repositories and tuned on curated instruction pairs. It produces idiomatic
Python functions from natural language descriptions and can continue partial
snippets that a developer has already started writing in the editor.

## Intended uses

The primary use is code generation inside editor extensions and batch
refactoring helpers. The model works best on self-contained functions under a
few hundred lines. It is not a chat assistant and it was not aligned for
open-ended dialogue. Downstream users should wrap it with their own prompt
scaffolding and sampling parameters suited to their latency budget.

## Training

Training ran for four epochs with a cosine learning-rate schedule on sixteen
accelerators. The tokenizer is byte-pair based with a vocabulary of roughly
forty-nine thousand entries. We removed near-duplicate files and filtered
machine-generated artifacts before training to keep the corpus clean, and we
held out a validation split stratified by repository to monitor convergence
throughout every epoch of the schedule.

## Limitations

The model may produce plausible but wrong programs. Always execute and
inspect its output before shipping it anywhere important. Performance
degrades quickly on languages other than Python and on very long contexts,
and the model has no awareness of project-specific conventions unless they
appear in the prompt. Treat generated snippets as drafts for human review
rather than finished work, and measure them against your own internal
quality bars before adoption.

## Acknowledgements

Training infrastructure was provided by the open compute grant program, and
the evaluation harness builds on community tooling maintained by volunteers.
"""

_FILLER_TOPICS = [
    "image classification of houseplants",
    "speech transcription for podcasts",
    "sentiment-free news topic grouping",
    "translation between Dutch and Frisian",
    "tabular churn prediction",
    "protein structure embedding",
    "chess position evaluation",
    "recipe ingredient parsing for cooking sites",
    "handwriting recognition on forms",
    "music genre tagging",
    "satellite imagery segmentation",
    "weather nowcasting",
    "document layout detection",
    "e-commerce product matching",
    "face anonymization for street photos",
    "drum sample synthesis",
    "poetry style transfer",
    "wildlife camera-trap detection",
    "financial time-series forecasting",
    "medical entity linking",
    "sign-language pose estimation",
    "grammar correction for essays",
    "3d mesh simplification",
    "traffic flow estimation",
    "crop disease identification",
    "voice activity detection",
    "astronomy transient detection",
    "ocean temperature interpolation",
    "furniture style recommendation",
    "resume field extraction",
    "sports highlight ranking",
    "noise suppression for calls",
    "barcode localization",
]


def _ts(value: str) -> datetime:
    return datetime.fromisoformat(value).replace(tzinfo=timezone.utc)


def build_records() -> list[ModelRecord]:
    records: list[ModelRecord] = []

    # m00-m02: no card, no metadata, no abstracts (nothing to prepare)
    for i in range(3):
        records.append(ModelRecord(model_id=f"fix/m{i:02}", created_at=_ts(f"2021-0{i + 1}-10T00:00:00")))

    # m03: no card, abstract without SE content
    records.append(
        ModelRecord(
            model_id="fix/m03",
            created_at=_ts("2022-02-02T00:00:00"),
            arxiv_ids=["2202.00001"],
            abstracts=[
                (
                    "2202.00001",
                    "We study galaxy formation with a hierarchical simulation and report "
                    "new constraints on halo growth across cosmic time.",
                )
            ],
        )
    )

    # m04: no card, SE-relevant abstract only (program repair)
    records.append(
        ModelRecord(
            model_id="fix/m04",
            created_at=_ts("2022-08-01T00:00:00"),
            ml_task="text2text-generation",
            arxiv_ids=["2301.00001"],
            abstracts=[
                (
                    "2301.00001",
                    "We present RepairNet, a sequence-to-sequence approach to program repair "
                    "that rewrites buggy Java methods and validates candidate patches against "
                    "developer-written suites.",
                )
            ],
        )
    )

    # m05-m07: card file exists but is empty
    for i in range(5, 8):
        records.append(
            ModelRecord(
                model_id=f"fix/m{i:02}",
                created_at=_ts(f"2021-1{i - 5}-05T00:00:00"),
                card_body="",
                metadata={},
            )
        )

    # m08-m40: ordinary cards with no SE task mentions
    for i, topic in zip(range(8, 41), _FILLER_TOPICS):
        year = 2020 + (i % 5)
        month = (i % 12) + 1
        records.append(
            ModelRecord(
                model_id=f"fix/m{i:02}",
                created_at=None if i == 10 else _ts(f"{year}-{month:02}-15T00:00:00"),
                card_body=(
                    f"# Model m{i:02}\n\nThis model handles {topic}. It ships with ONNX "
                    "weights and a small demo notebook. Trained on public data that the "
                    "authors cleaned and deduplicated by hand.\n"
                ),
                metadata={"license": "apache-2.0" if i % 3 else "mit"},
                license="apache-2.0" if i % 3 else "mit",
                ml_task="image-classification" if i % 2 else "automatic-speech-recognition",
                downloads=i * 37 if i % 4 else None,
            )
        )

    # m41: metadata `debug: None` is its only hit; removed by the rules
    records.append(
        ModelRecord(
            model_id="fix/m41",
            created_at=_ts("2023-03-03T00:00:00"),
            card_body=(
                "# VisionTuner\n\nA fine-tuned vision transformer for flower species "
                "identification with strong augmentation.\n"
            ),
            metadata={"debug": "None", "license": "apache-2.0"},
            license="apache-2.0",
            ml_task="image-classification",
        )
    )

    # m42: `import logging` snippet is its only hit
    records.append(
        ModelRecord(
            model_id="fix/m42",
            created_at=_ts("2023-04-04T00:00:00"),
            card_body=(
                "# Loader utilities\n\nUtility checkpoints for streaming datasets.\n\n"
                "```python\nimport logging\nlogger = make_default()\n```\n"
            ),
            metadata={"license": "mit"},
            license="mit",
        )
    )

    # m43: `train log` table is its only hit
    records.append(
        ModelRecord(
            model_id="fix/m43",
            created_at=_ts("2023-05-05T00:00:00"),
            card_body=(
                "# Distil run artifacts\n\nSee the train log below for loss curves.\n\n"
                "| step | loss |\n|---|---|\n| 100 | 2.31 |\n"
            ),
            metadata={"license": "mit"},
            license="mit",
        )
    )

    # m44: mentions coding but carries no `code` tag
    records.append(
        ModelRecord(
            model_id="fix/m44",
            created_at=_ts("2023-07-07T00:00:00"),
            card_body=(
                "# StudyBuddy\n\nA small model for coding practice questions aimed at "
                "introductory courses.\n"
            ),
            metadata={"license": "cc-by-4.0", "tags": ["education"]},
            tags=["education"],
            license="cc-by-4.0",
        )
    )

    # m45/m46: near-identical pair differing only in the model name
    records.append(
        ModelRecord(
            model_id="fix/m45",
            created_at=_ts("2023-05-20T10:00:00"),
            card_body=_DUP_TEMPLATE.format(name="CodeGen-Alpha"),
            metadata={"license": "apache-2.0", "tags": ["python", "code"], "pipeline_tag": "text-generation"},
            tags=["python", "code"],
            license="apache-2.0",
            ml_task="text-generation",
            base_model="bigcode/starcoderbase",
        )
    )
    records.append(
        ModelRecord(
            model_id="fix/m46",
            created_at=_ts("2024-01-15T09:30:00"),
            card_body=_DUP_TEMPLATE.format(name="CodeGen-Beta"),
            metadata={"license": "apache-2.0", "tags": ["python", "code"], "pipeline_tag": "text-generation"},
            tags=["python", "code"],
            license="apache-2.0",
            ml_task="text-generation",
            base_model="bigcode/starcoderbase",
        )
    )

    # m47: the selection-walkthrough winner (python + energy metadata + mit)
    records.append(
        ModelRecord(
            model_id="fix/m47",
            created_at=_ts("2024-05-10T12:00:00"),
            card_body=(
                "# PyComplete\n\nPyComplete is a transformer for code completion inside "
                "Python editors. It suggests the next statement from the surrounding "
                "context.\n\n## Evaluation\n\n| Benchmark | Score |\n|---|---|\n"
                "| HumanEval | 67.2 |\n| MBPP | 58.9 |\n"
            ),
            metadata={
                "license": "mit",
                "tags": ["python", "code"],
                "pipeline_tag": "text-generation",
                "co2_eq_emissions": {"emissions": 18.4, "source": "mlco2"},
                "datasets": ["codeparrot/github-code-clean"],
            },
            tags=["python", "code"],
            license="mit",
            ml_task="text-generation",
            base_model="bigcode/starcoderbase",
            declared_datasets=["codeparrot/github-code-clean"],
        )
    )

    # m48: multi-activity candidate (code review + code generation)
    records.append(
        ModelRecord(
            model_id="fix/m48",
            created_at=_ts("2023-06-20T08:00:00"),
            card_body=(
                "# ReviewBot\n\nReviewBot drafts code review remarks for pull requests "
                "and performs code generation for suggested fixes.\n"
            ),
            metadata={"license": "apache-2.0", "tags": ["code"], "pipeline_tag": "text-generation"},
            tags=["code"],
            license="apache-2.0",
            ml_task="text-generation",
            base_model="meta-llama/Llama-2-7b-hf",
        )
    )

    # m49: survives filtering but the judge rejects it (speaker verification)
    records.append(
        ModelRecord(
            model_id="fix/m49",
            created_at=_ts("2023-11-11T11:11:11"),
            card_body=(
                "# EchoVerify\n\nEchoVerify performs speaker verification for voice "
                "assistants and call-center authentication.\n"
            ),
            metadata={"license": "mit", "tags": ["audio"]},
            tags=["audio"],
            license="mit",
            ml_task="audio-classification",
        )
    )

    records.sort(key=lambda r: r.model_id)
    assert len(records) == 50, len(records)
    return records


def main() -> None:
    records = build_records()
    # guard: the duplicate pair must actually clear the 0.99 threshold in the
    # post-outlier corpus (the six survivors)
    survivors = ["fix/m04", "fix/m45", "fix/m46", "fix/m47", "fix/m48", "fix/m49"]
    by_id = {r.model_id: r for r in records}
    vectors = vectorize_corpus([(m, by_id[m].card_body or "") for m in survivors])
    sim = cosine(vectors.vectors["fix/m45"], vectors.vectors["fix/m46"])
    assert sim >= 0.992, f"duplicate pair cosine too low: {sim}"
    other = cosine(vectors.vectors["fix/m45"], vectors.vectors["fix/m47"])
    assert other < 0.99, f"unrelated card unexpectedly similar: {other}"

    snapshot = Snapshot(
        records=records,
        fetched_at=_ts("2025-03-24T00:00:00"),
        source=SnapshotSource.LOCAL_FILE,
    )
    store_snapshot(snapshot, OUT)
    print(f"wrote {OUT} ({len(records)} records); dup cosine={sim:.5f}")


if __name__ == "__main__":
    main()
