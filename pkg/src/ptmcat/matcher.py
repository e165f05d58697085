"""Ordered, contiguous, whole-token phrase matching over prepared documents."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .taxonomy import SeTask, Taxonomy
from .textprep import PreparedDoc, SourceField

_FIELD_ORDER = {SourceField.CARD_BODY: 0, SourceField.CARD_METADATA: 1, SourceField.ABSTRACT: 2}


@dataclass(frozen=True)
class TaskHit:
    model_id: str
    task: SeTask
    source_field: SourceField
    token_span: tuple[int, int]  # (first token index, last token index), inclusive
    char_span: tuple[int, int]  # (start of first token, end of last token)

    def sort_key(self):
        return (
            self.model_id,
            _FIELD_ORDER[self.source_field],
            self.token_span,
            self.task.activity.value,
            self.task.name,
        )


def find_hits(doc: PreparedDoc, taxonomy: Taxonomy, model_id: str) -> list[TaskHit]:
    """Emit one hit per occurrence of each task phrase in the doc's lemmas.

    A phrase occurs when its lemma sequence appears as a contiguous run of
    whole tokens, in order. Occurrences of different tasks may overlap; all
    are reported. Output order is deterministic: by token position, then
    span, then task.
    """
    lemmas = doc.lemmas
    if not lemmas:
        return []
    # group phrases by first lemma so each position only tries plausible tasks
    by_first: dict[str, list[SeTask]] = {}
    for task in taxonomy.tasks:
        by_first.setdefault(task.prepared_phrase[0], []).append(task)

    hits: list[TaskHit] = []
    for i, lemma in enumerate(lemmas):
        for task in by_first.get(lemma, ()):
            phrase = task.prepared_phrase
            j = i + len(phrase)
            if j <= len(lemmas) and lemmas[i:j] == phrase:
                first, last = doc.tokens[i], doc.tokens[j - 1]
                hits.append(
                    TaskHit(
                        model_id=model_id,
                        task=task,
                        source_field=doc.source_field,
                        token_span=(i, j - 1),
                        char_span=(first.start, last.end),
                    )
                )
    hits.sort(key=TaskHit.sort_key)
    return hits


def write_hits(hits: list[TaskHit], path: str | Path) -> None:
    """Dump hits as tab-separated audit records, one per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for h in sorted(hits, key=TaskHit.sort_key):
            fh.write(
                "\t".join(
                    [
                        h.model_id,
                        h.task.activity.value,
                        h.task.name,
                        h.source_field.value,
                        str(h.char_span[0]),
                        str(h.char_span[1]),
                    ]
                )
                + "\n"
            )


def read_hits(path: str | Path, taxonomy: Taxonomy) -> list[tuple[str, str, str, SourceField, int, int]]:
    rows = []
    for line in Path(path).read_text("utf-8").splitlines():
        model_id, activity, task, field, start, end = line.split("\t")
        rows.append((model_id, activity, task, SourceField(field), int(start), int(end)))
    return rows
