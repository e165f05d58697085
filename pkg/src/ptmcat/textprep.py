"""Deterministic text normalization: tokenization, lowercasing, lemmatization.

The same normalizer is used for taxonomy task phrases and for documents
(card bodies, flattened card metadata, abstracts), so a phrase and its
inflected occurrences reduce to identical lemma sequences.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)  # alnum runs; '_' and '-' are separators

_VOWELS = set("aeiou")


class SourceField(Enum):
    CARD_BODY = "card_body"
    CARD_METADATA = "card_metadata"
    ABSTRACT = "abstract"


@dataclass(frozen=True)
class Token:
    raw: str  # lowercased surface form
    lemma: str
    start: int  # char offset into the raw text
    end: int


@dataclass(frozen=True)
class PreparedDoc:
    source_field: SourceField
    tokens: tuple[Token, ...]

    @property
    def lemmas(self) -> tuple[str, ...]:
        return tuple(t.lemma for t in self.tokens)


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        # 'y' is a consonant at the start or after a vowel
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Count vowel->consonant transitions (Porter's m)."""
    m = 0
    prev_c = True
    for i in range(len(stem)):
        c = _is_consonant(stem, i)
        if c and not prev_c:
            m += 1
        prev_c = c
    return m


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    return (
        _is_consonant(stem, len(stem) - 3)
        and not _is_consonant(stem, len(stem) - 2)
        and _is_consonant(stem, len(stem) - 1)
        and stem[-1] not in "wxy"
    )


def _fix_stem(stem: str) -> str:
    """Repair a stem after -ing/-ed removal: undouble or restore silent e."""
    if (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and _is_consonant(stem, len(stem) - 1)
        and stem[-1] not in "lsz"
    ):
        return stem[:-1]
    if _measure(stem) == 1 and _ends_cvc(stem):
        return stem + "e"
    return stem


def _strip_one_suffix(word: str) -> str:
    """Apply at most one suffix rule; returns the word unchanged if none fires."""
    if word.isdigit():
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("es") and word[:-2].endswith(("x", "z", "ch", "sh", "ss")):
        return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is")) and len(word) > 3:
        return word[:-1]
    if word.endswith("ing") and len(word) - 3 >= 3:
        return _fix_stem(word[:-3])
    if word.endswith("ed") and len(word) - 2 >= 3:
        return _fix_stem(word[:-2])
    return word


def _load_default_exceptions() -> dict[str, str]:
    text = resources.files("ptmcat.data").joinpath("lemma_exceptions.tsv").read_text("utf-8")
    return parse_exception_table(text)


def parse_exception_table(text: str) -> dict[str, str]:
    """Parse a `surface<TAB>lemma` table, `#` comments and blank lines allowed."""
    table: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        surface, _, lemma = line.partition("\t")
        table[surface.strip().lower()] = lemma.strip().lower()
    return table


class Normalizer:
    """Suffix-stripping lemmatizer with an exception table.

    Lemmatization iterates to a fixpoint, which makes it idempotent: the
    lemma of a lemma is itself.
    """

    def __init__(self, exceptions: dict[str, str] | None = None):
        self.exceptions = _load_default_exceptions() if exceptions is None else dict(exceptions)

    def lemmatize(self, token: str) -> str:
        lemma = token.lower()
        prev = None
        while lemma != prev and lemma:
            prev = lemma
            lemma = self.exceptions.get(lemma) or _strip_one_suffix(lemma)
        return lemma

    def prepare(self, text: str, source_field: SourceField = SourceField.CARD_BODY) -> PreparedDoc:
        """Tokenize + lowercase + lemmatize, keeping char offsets into `text`."""
        tokens = []
        for m in _TOKEN_RE.finditer(text):
            raw = m.group(0).lower()
            lemma = self.lemmatize(raw)
            if not lemma:
                lemma = raw
            tokens.append(Token(raw=raw, lemma=lemma, start=m.start(), end=m.end()))
        return PreparedDoc(source_field=source_field, tokens=tuple(tokens))

    def lemma_sequence(self, phrase: str) -> tuple[str, ...]:
        return self.prepare(phrase).lemmas


def flatten_metadata(metadata: dict) -> str:
    """Render a card metadata map as `key: value` lines for matching.

    Keys become matchable tokens (a `debug` key is findable just like body
    text). Rendering is deterministic in the map's insertion order.
    """
    lines = []
    for key, value in metadata.items():
        lines.append(f"{key}: {_render_value(value)}")
    return "\n".join(lines)


def _render_value(value) -> str:
    if value is None:
        return "None"
    if isinstance(value, dict):
        return "; ".join(f"{k}={_render_value(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return ", ".join(_render_value(v) for v in value)
    return str(value)
