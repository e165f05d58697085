"""Pilot-study machinery: sample sizing, stratified sampling, agreement stats."""

from __future__ import annotations

import csv
import math
import random
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .taxonomy import SeActivity

# two-sided normal quantiles for the supported confidence levels
Z_VALUES = {0.90: 1.645, 0.95: 1.96, 0.99: 2.576}


class InvalidParameter(ValueError):
    pass


class SampleTooSmall(Warning):
    pass


class EvenPanel(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class SamplePlan:
    activity: SeActivity
    population_n: int
    confidence: float = 0.95
    margin: float = 0.05
    proportion_p: float = 0.5
    sample_n: int = 0


def sample_size(population_n: int, confidence: float = 0.95, margin: float = 0.05, proportion: float = 0.5) -> int:
    """Base sample size with finite-population correction, rounded up.

    n0 = z^2 * p(1-p) / e^2, then n = n0 / (1 + (n0 - 1) / N), capped at N.
    """
    if population_n < 1:
        raise InvalidParameter(f"population must be >= 1, got {population_n}")
    if not (0 < margin < 1):
        raise InvalidParameter(f"margin must be in (0, 1), got {margin}")
    if not (0 < proportion < 1):
        raise InvalidParameter(f"proportion must be in (0, 1), got {proportion}")
    z = Z_VALUES.get(round(confidence, 4))
    if z is None:
        raise InvalidParameter(f"confidence must be one of {sorted(Z_VALUES)}, got {confidence}")
    n0 = (z * z) * proportion * (1 - proportion) / (margin * margin)
    n = n0 / (1 + (n0 - 1) / population_n)
    return min(math.ceil(n), population_n)


def make_plan(activity: SeActivity, population_n: int, confidence: float = 0.95, margin: float = 0.05, proportion: float = 0.5) -> SamplePlan:
    n = sample_size(population_n, confidence, margin, proportion)
    return SamplePlan(
        activity=activity,
        population_n=population_n,
        confidence=confidence,
        margin=margin,
        proportion_p=proportion,
        sample_n=n,
    )


@dataclass
class SampleDraw:
    items: list  # the drawn candidates, in draw order
    overlap: list = field(default_factory=list)  # subset for double annotation


def draw_sample(candidates: list, n: int, seed: int, tasks_of=None, overlap_fraction: float = 0.0) -> SampleDraw:
    """Draw n candidates, stratified so every task keeps representation.

    `tasks_of` maps a candidate to its task names (defaults to a `tasks`
    attribute). Every task present among the candidates contributes at
    least one item when n allows; remaining slots are filled uniformly
    without replacement. Deterministic for a given seed.
    """
    if n > len(candidates):
        raise InvalidParameter(f"sample size {n} exceeds population {len(candidates)}")
    if tasks_of is None:
        tasks_of = lambda c: getattr(c, "tasks", ())
    rng = random.Random(seed)
    ordered = sorted(candidates, key=_candidate_key)

    by_task: dict[str, list] = {}
    for cand in ordered:
        for task in sorted(tasks_of(cand)):
            by_task.setdefault(task, []).append(cand)
    if n < len(by_task):
        warnings.warn(
            f"sample of {n} cannot cover all {len(by_task)} tasks; drawing best-effort coverage",
            SampleTooSmall,
        )

    chosen: list = []
    chosen_ids: set[int] = set()

    def take(cand):
        chosen.append(cand)
        chosen_ids.add(id(cand))

    # one representative per task while the budget lasts; scarcest tasks first
    for task in sorted(by_task, key=lambda t: (len(by_task[t]), t)):
        if len(chosen) >= n:
            break
        if any(id(c) in chosen_ids for c in by_task[task]):
            continue
        take(rng.choice(by_task[task]))

    remaining = [c for c in ordered if id(c) not in chosen_ids]
    while len(chosen) < n and remaining:
        take(remaining.pop(rng.randrange(len(remaining))))

    overlap: list = []
    if overlap_fraction > 0 and chosen:
        k = max(1, math.ceil(len(chosen) * overlap_fraction))
        overlap = rng.sample(chosen, k)
    return SampleDraw(items=chosen, overlap=overlap)


def _candidate_key(cand):
    return getattr(cand, "model_id", None) or str(cand)


def majority_vote(verdicts: list[bool]) -> bool:
    if len(verdicts) % 2 == 0:
        raise EvenPanel(f"need an odd panel, got {len(verdicts)} verdicts")
    return sum(1 for v in verdicts if v) > len(verdicts) / 2


class AgreementBand(Enum):
    POOR = "Poor"
    SLIGHT = "Slight"
    FAIR = "Fair"
    MODERATE = "Moderate"
    SUBSTANTIAL = "Substantial"
    ALMOST_PERFECT = "Almost perfect"
    PERFECT = "Perfect"


def agreement_band(kappa: float) -> AgreementBand:
    if kappa >= 1.0:
        return AgreementBand.PERFECT
    if kappa > 0.80:
        return AgreementBand.ALMOST_PERFECT
    if kappa > 0.60:
        return AgreementBand.SUBSTANTIAL
    if kappa > 0.40:
        return AgreementBand.MODERATE
    if kappa > 0.20:
        return AgreementBand.FAIR
    if kappa > 0.0:
        return AgreementBand.SLIGHT
    return AgreementBand.POOR


@dataclass(frozen=True)
class KappaResult:
    observed_agreement_po: float
    expected_agreement_pe: float
    kappa: float
    n_items: int
    band: AgreementBand

    def to_json(self) -> dict:
        return {
            "observed_agreement_po": self.observed_agreement_po,
            "expected_agreement_pe": self.expected_agreement_pe,
            "kappa": self.kappa,
            "n_items": self.n_items,
            "band": self.band.value,
        }


def cohen_kappa(a: list[bool], b: list[bool]) -> KappaResult:
    """Chance-corrected agreement between two binary raters.

    po is the raw agreement rate; pe sums the products of the raters'
    marginals per label. When both raters are constant and equal (pe = 1,
    po = 1) kappa is defined as 1.0.
    """
    if len(a) != len(b):
        raise LengthMismatch(f"label lists differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise EmptyInput("label lists are empty")
    n = len(a)
    po = sum(1 for x, y in zip(a, b) if bool(x) == bool(y)) / n
    a_true = sum(1 for x in a if x) / n
    b_true = sum(1 for y in b if y) / n
    pe = a_true * b_true + (1 - a_true) * (1 - b_true)
    if pe >= 1.0:
        kappa = 1.0
    else:
        kappa = (po - pe) / (1 - pe)
    return KappaResult(
        observed_agreement_po=po,
        expected_agreement_pe=pe,
        kappa=kappa,
        n_items=n,
        band=agreement_band(kappa),
    )


ANNOTATION_HEADER = ["model_id", "activity", "annotator_id", "verdict", "reasoning"]


@dataclass
class AnnotationSet:
    entries: list[tuple[str, SeActivity, str, bool, str]] = field(default_factory=list)

    def add(self, model_id: str, activity: SeActivity, annotator_id: str, verdict: bool, reasoning: str = "") -> None:
        key = (model_id, activity, annotator_id)
        if any((e[0], e[1], e[2]) == key for e in self.entries):
            raise ValueError(f"duplicate annotation for {key}")
        self.entries.append((model_id, activity, annotator_id, verdict, reasoning))

    def verdicts_for(self, model_id: str, activity: SeActivity) -> list[bool]:
        return [e[3] for e in self.entries if e[0] == model_id and e[1] == activity]


def load_annotations(path: str | Path) -> AnnotationSet:
    annotations = AnnotationSet()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(ANNOTATION_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"annotation file missing columns: {sorted(missing)}")
        for row in reader:
            annotations.add(
                row["model_id"],
                SeActivity.parse(row["activity"]),
                row["annotator_id"],
                row["verdict"].strip().lower() in ("true", "yes", "1"),
                row.get("reasoning", ""),
            )
    return annotations


def save_annotations(annotations: AnnotationSet, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ANNOTATION_HEADER)
        for model_id, activity, annotator_id, verdict, reasoning in annotations.entries:
            writer.writerow([model_id, activity.value, annotator_id, str(verdict).lower(), reasoning])
