"""Outlier exclusion: drop noisy hits for a few over-matching tasks.

The rules re-inspect the raw, un-lemmatized text around each hit. Only the
tasks named in the rules file are affected; every other hit passes through.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from ..ingest.records import ModelRecord
from ..matcher import TaskHit
from ..textprep import SourceField, flatten_metadata

QUOTE_CHARS = set("\"'`“”‘’")

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


class RuleKind(Enum):
    PRECEDED_BY = "preceded_by"
    FOLLOWED_BY = "followed_by"
    PRECEDED_BY_QUOTE = "preceded_by_quote"
    FOLLOWED_BY_QUOTE = "followed_by_quote"
    FOLLOWED_BY_ALPHA_EXCEPT = "followed_by_alpha_except"
    BETWEEN_PERIOD_AND_LETTER = "between_period_and_letter"
    LITERAL_PHRASE = "literal_phrase"
    REQUIRES_TAG = "requires_tag"


@dataclass(frozen=True)
class ExclusionRule:
    rule_id: str
    task_name: str
    keyword: str  # raw-text anchor ("debug", "log"); unused for requires_tag
    kind: RuleKind
    arg: str = ""

    def char_set(self) -> set[str]:
        return set(self.arg.split())


@dataclass(frozen=True)
class Removal:
    hit: TaskHit
    rule_ids: tuple[str, ...]  # every rule that fired, for audit


@dataclass
class ExclusionOutcome:
    kept: list[TaskHit]
    removals: list[Removal]


def load_rules(path: str | Path | None = None) -> list[ExclusionRule]:
    if path is None:
        text = resources.files("ptmcat.data").joinpath("exclusion_rules.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    rules = []
    for line in text.splitlines():
        line = line.rstrip()
        if not line or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 4:
            raise ValueError(f"malformed rule line: {line!r}")
        rule_id, task_name, keyword, kind = parts[:4]
        arg = parts[4] if len(parts) > 4 and parts[4] != "-" else ""
        rules.append(
            ExclusionRule(
                rule_id=rule_id,
                task_name=task_name,
                keyword=keyword.lower(),
                kind=RuleKind(kind),
                arg=arg,
            )
        )
    return rules


def record_source_texts(record: ModelRecord) -> dict[SourceField, str]:
    """The raw text per source that matching and rule checks both run against."""
    texts: dict[SourceField, str] = {}
    if record.card_body is not None:
        texts[SourceField.CARD_BODY] = record.card_body
    if record.metadata:
        texts[SourceField.CARD_METADATA] = flatten_metadata(record.metadata)
    if record.abstracts:
        texts[SourceField.ABSTRACT] = "\n\n".join(text for _, text in record.abstracts)
    return texts


def apply_exclusion_rules(
    record: ModelRecord,
    hits: list[TaskHit],
    rules: list[ExclusionRule] | None = None,
    source_texts: dict[SourceField, str] | None = None,
) -> ExclusionOutcome:
    """Remove hits whose raw context matches any rule for their task.

    All firing rules are recorded per removal so the audit trail shows
    exactly why a hit died (some rules deliberately overlap).
    """
    if rules is None:
        rules = load_rules()
    if source_texts is None:
        source_texts = record_source_texts(record)
    by_task: dict[str, list[ExclusionRule]] = {}
    for rule in rules:
        by_task.setdefault(rule.task_name, []).append(rule)

    kept: list[TaskHit] = []
    removals: list[Removal] = []
    tags = {str(t).strip().lower() for t in record.tags}
    for hit in hits:
        task_rules = by_task.get(hit.task.name)
        if not task_rules:
            kept.append(hit)
            continue
        text = source_texts.get(hit.source_field, "")
        fired = tuple(
            rule.rule_id for rule in task_rules if _rule_fires(rule, text, hit, tags)
        )
        if fired:
            removals.append(Removal(hit=hit, rule_ids=fired))
        else:
            kept.append(hit)
    return ExclusionOutcome(kept=kept, removals=removals)


def _rule_fires(rule: ExclusionRule, text: str, hit: TaskHit, tags: set[str]) -> bool:
    if rule.kind is RuleKind.REQUIRES_TAG:
        return rule.arg.lower() not in tags

    start, end = hit.char_span
    token = text[start:end]
    # position just after the anchor keyword (inside the token when inflected)
    if token.lower().startswith(rule.keyword):
        kw_end = start + len(rule.keyword)
    else:
        kw_end = end
    before = text[start - 1] if start > 0 else ""
    after = text[kw_end] if kw_end < len(text) else ""

    if rule.kind is RuleKind.PRECEDED_BY:
        return before in rule.char_set()
    if rule.kind is RuleKind.FOLLOWED_BY:
        return after in rule.char_set()
    if rule.kind is RuleKind.PRECEDED_BY_QUOTE:
        return before in QUOTE_CHARS
    if rule.kind is RuleKind.FOLLOWED_BY_QUOTE:
        return after in QUOTE_CHARS
    if rule.kind is RuleKind.FOLLOWED_BY_ALPHA_EXCEPT:
        return after.isalpha() and after.lower() not in set(rule.arg.lower())
    if rule.kind is RuleKind.BETWEEN_PERIOD_AND_LETTER:
        return before == "." and after.isalpha()
    if rule.kind is RuleKind.LITERAL_PHRASE:
        return _phrase_fires(rule.arg.lower(), text, start, end)
    raise AssertionError(f"unhandled rule kind {rule.kind}")


def _phrase_fires(phrase: str, text: str, start: int, end: int) -> bool:
    words = phrase.split()
    prefix, last = words[:-1], words[-1]
    if not text[start:end].lower().startswith(last):
        return False
    preceding = _WORD_RE.findall(text[:start].lower())
    if len(preceding) < len(prefix):
        return False
    return preceding[len(preceding) - len(prefix) :] == prefix
