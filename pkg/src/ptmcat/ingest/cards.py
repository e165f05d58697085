"""Model card parsing: YAML-style header block + markdown body, arXiv links."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import yaml

# new-style 2401.00001 (optional version) and legacy cs/0112017 forms
_ARXIV_NEW = r"\d{4}\.\d{4,5}(?:v\d+)?"
_ARXIV_LEGACY = r"[a-z-]+(?:\.[A-Z]{2})?/\d{7}"
_ARXIV_TAG_RE = re.compile(rf"^arxiv:({_ARXIV_NEW}|{_ARXIV_LEGACY})$", re.IGNORECASE)
_ARXIV_URL_RE = re.compile(
    rf"arxiv\.org/(?:abs|pdf)/({_ARXIV_NEW}|{_ARXIV_LEGACY})", re.IGNORECASE
)


@dataclass
class ParsedCard:
    metadata: dict
    body: str
    warnings: list[str] = field(default_factory=list)


def parse_card(raw: str | bytes) -> ParsedCard:
    """Split a card into its header map and markdown body.

    The header is a leading block delimited by `---` lines. Malformed
    headers degrade to an empty map plus the full text, with a warning
    recorded. Non-UTF-8 bytes are decoded with replacement.
    """
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    lines = raw.split("\n")
    if not lines or lines[0].strip() != "---":
        return ParsedCard(metadata={}, body=raw)
    end = None
    for i in range(1, len(lines)):
        if lines[i].strip() in ("---", "..."):
            end = i
            break
    if end is None:
        return ParsedCard(metadata={}, body=raw, warnings=["unterminated header block"])
    header_text = "\n".join(lines[1:end])
    body = "\n".join(lines[end + 1 :])
    try:
        metadata = yaml.safe_load(header_text)
    except yaml.YAMLError as exc:
        return ParsedCard(metadata={}, body=raw, warnings=[f"header parse failed: {exc}"])
    if metadata is None:
        metadata = {}
    if not isinstance(metadata, dict):
        return ParsedCard(metadata={}, body=raw, warnings=["header is not a mapping"])
    return ParsedCard(metadata=metadata, body=body)


def card_fields(metadata: dict) -> dict:
    """Pull the conventional header attributes out of a parsed card map."""
    tags = metadata.get("tags")
    if isinstance(tags, str):
        tags = [tags]
    tags = [str(t) for t in tags] if isinstance(tags, list) else []
    datasets = metadata.get("datasets")
    if isinstance(datasets, str):
        datasets = [datasets]
    datasets = [str(d) for d in datasets] if isinstance(datasets, list) else []
    base_model = metadata.get("base_model")
    if isinstance(base_model, list):
        base_model = str(base_model[0]) if base_model else None
    return {
        "license": _opt_str(metadata.get("license")),
        "tags": tags,
        "base_model": _opt_str(base_model),
        "declared_datasets": datasets,
        "ml_task": _opt_str(metadata.get("pipeline_tag")),
    }


def _opt_str(value) -> str | None:
    return None if value is None else str(value)


def extract_arxiv_ids(metadata: dict | None, body: str | None) -> list[str]:
    """Collect arXiv ids from `arxiv:` tags and arXiv URLs, de-duplicated."""
    ids: list[str] = []
    seen: set[str] = set()

    def add(candidate: str):
        normalized = candidate.strip()
        # drop a version suffix so 2106.09685v2 and v1 collapse
        normalized = re.sub(r"v\d+$", "", normalized, flags=re.IGNORECASE)
        if normalized and normalized not in seen:
            seen.add(normalized)
            ids.append(normalized)

    tags = (metadata or {}).get("tags") or []
    if isinstance(tags, str):
        tags = [tags]
    for tag in tags:
        m = _ARXIV_TAG_RE.match(str(tag).strip())
        if m:
            add(m.group(1))
    if body:
        for m in _ARXIV_URL_RE.finditer(body):
            add(m.group(1))
    return ids
