"""Aggregate statistics over a classified catalogue, emitted as plot-ready data."""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime
from importlib import resources
from pathlib import Path

from .catalogue import CatalogueEntry
from .taxonomy import SeActivity

_PUNCT_RE = re.compile(r"[^0-9a-z]+")


def _quarter(ts: datetime) -> str:
    return f"{ts.year}Q{(ts.month - 1) // 3 + 1}"


def _quarter_range(first: str, last: str) -> list[str]:
    year, q = int(first[:4]), int(first[5])
    end_year, end_q = int(last[:4]), int(last[5])
    quarters = []
    while (year, q) <= (end_year, end_q):
        quarters.append(f"{year}Q{q}")
        q += 1
        if q == 5:
            year, q = year + 1, 1
    return quarters


@dataclass
class QuarterlySeries:
    quarters: list[str]
    totals: list[int]  # each dated entry counted once
    by_activity: dict[str, list[int]]
    undated_count: int

    def total_dated(self) -> int:
        return sum(self.totals)

    def to_json(self) -> dict:
        return {
            "quarters": self.quarters,
            "totals": self.totals,
            "by_activity": self.by_activity,
            "undated_count": self.undated_count,
        }


def quarterly_series(entries: list[CatalogueEntry]) -> QuarterlySeries:
    """New-entry counts per calendar quarter (UTC), one series per activity.

    Undated entries are excluded from the series and reported separately.
    Quarters run contiguously from the first to the last observed. The
    `totals` series counts each entry once; an entry also contributes to
    the series of every activity it belongs to.
    """
    dated = [e for e in entries if e.created_at is not None]
    undated = len(entries) - len(dated)
    if not dated:
        return QuarterlySeries(quarters=[], totals=[], by_activity={}, undated_count=undated)
    quarters_seen = sorted(_quarter(e.created_at) for e in dated)
    quarters = _quarter_range(quarters_seen[0], quarters_seen[-1])
    index = {q: i for i, q in enumerate(quarters)}
    totals = [0] * len(quarters)
    by_activity = {a.value: [0] * len(quarters) for a in SeActivity}
    for entry in dated:
        qi = index[_quarter(entry.created_at)]
        totals[qi] += 1
        for activity in entry.activities:
            by_activity[activity.value][qi] += 1
    by_activity = {a: counts for a, counts in by_activity.items() if any(counts)}
    return QuarterlySeries(quarters=quarters, totals=totals, by_activity=by_activity, undated_count=undated)


@dataclass
class ClassificationStats:
    task_counts: dict[str, int]  # task name -> entries mentioning it
    task_activity: dict[str, str]  # task name -> activity (for plotting colors)
    activity_counts: dict[str, int]
    flow_edges: list[tuple[str, str, int]]  # (ml_task, activity, weight)
    cooccurrence: dict[str, dict[str, int]]  # m[i][j]; diagonal = activity counts
    reuse_fractions: dict[str, dict[str, float]]  # r[i][j] = m[i][j] / m[i][i]

    def to_json(self) -> dict:
        return {
            "task_counts": self.task_counts,
            "task_activity": self.task_activity,
            "activity_counts": self.activity_counts,
            "flow_edges": [[m, a, w] for m, a, w in self.flow_edges],
            "cooccurrence": self.cooccurrence,
            "reuse_fractions": self.reuse_fractions,
        }


def classification_stats(
    entries: list[CatalogueEntry], task_activities: dict[str, str] | None = None
) -> ClassificationStats:
    task_counts: Counter = Counter()
    activity_counts: Counter = Counter()
    flow: Counter = Counter()
    names = [a.value for a in SeActivity]
    m = {i: {j: 0 for j in names} for i in names}
    task_activity = dict(task_activities or {})

    for entry in entries:
        for task in entry.tasks:
            task_counts[task] += 1
        acts = sorted(a.value for a in entry.activities)
        for a in acts:
            activity_counts[a] += 1
            if entry.ml_task:
                flow[(entry.ml_task, a)] += 1
        for i in acts:
            for j in acts:
                m[i][j] += 1

    reuse = {
        i: {j: (m[i][j] / m[i][i] if m[i][i] else 0.0) for j in names}
        for i in names
    }
    edges = sorted(((mt, a, w) for (mt, a), w in flow.items()), key=lambda e: (-e[2], e[0], e[1]))
    return ClassificationStats(
        task_counts=dict(sorted(task_counts.items(), key=lambda kv: (-kv[1], kv[0]))),
        task_activity={t: task_activity.get(t, "") for t in task_counts},
        activity_counts=dict(sorted(activity_counts.items())),
        flow_edges=edges,
        cooccurrence=m,
        reuse_fractions=reuse,
    )


@dataclass
class AttributeStats:
    base_model_series: dict[str, dict]  # base model -> {total, quarters, cumulative}
    top_datasets: dict[str, list[dict]]  # activity -> top-3 {name, count, shared_with}
    license_counts: dict[str, dict[str, int]]  # activity -> license -> count
    benchmark_counts: dict[str, int]

    def to_json(self) -> dict:
        return {
            "base_model_series": self.base_model_series,
            "top_datasets": self.top_datasets,
            "license_counts": self.license_counts,
            "benchmark_counts": self.benchmark_counts,
        }


def attribute_stats(entries: list[CatalogueEntry], top_k_base_models: int = 15) -> AttributeStats:
    """Base-model reuse over time, top-3 datasets per activity, license spread."""
    base_entries: dict[str, list[CatalogueEntry]] = defaultdict(list)
    for entry in entries:
        if entry.base_model:
            base_entries[entry.base_model].append(entry)
    ranked = sorted(base_entries.items(), key=lambda kv: (-len(kv[1]), kv[0]))[:top_k_base_models]
    base_series: dict[str, dict] = {}
    for base, group in ranked:
        dated = sorted((e for e in group if e.created_at), key=lambda e: e.created_at)
        quarters = [_quarter(e.created_at) for e in dated]
        cumulative = list(range(1, len(dated) + 1))
        base_series[base] = {"total": len(group), "quarters": quarters, "cumulative": cumulative}

    dataset_activity: dict[str, Counter] = defaultdict(Counter)
    for entry in entries:
        for activity in entry.activities:
            for ds in entry.declared_datasets:
                dataset_activity[activity.value][ds] += 1
    top_datasets: dict[str, list[dict]] = {}
    for activity, counter in dataset_activity.items():
        top3 = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:3]
        rows = []
        for name, count in top3:
            shared = sorted(
                other
                for other, other_counter in dataset_activity.items()
                if other != activity and name in other_counter
            )
            rows.append({"name": name, "count": count, "shared_with": shared})
        top_datasets[activity] = rows

    license_counts: dict[str, Counter] = defaultdict(Counter)
    for entry in entries:
        if not entry.license:
            continue
        for activity in entry.activities:
            license_counts[activity.value][entry.license] += 1

    benchmark_counter: Counter = Counter()
    for entry in entries:
        for name in set(entry.benchmarks):
            benchmark_counter[name] += 1

    return AttributeStats(
        base_model_series=base_series,
        top_datasets=dict(sorted(top_datasets.items())),
        license_counts={a: dict(sorted(c.items())) for a, c in sorted(license_counts.items())},
        benchmark_counts=dict(sorted(benchmark_counter.items(), key=lambda kv: (-kv[1], kv[0]))),
    )


class BenchmarkLexicon:
    """Known benchmark names, matched case- and punctuation-insensitively."""

    def __init__(self, names: list[str] | None = None):
        if names is None:
            text = resources.files("ptmcat.data").joinpath("benchmarks.txt").read_text("utf-8")
            names = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        self._canonical: dict[str, str] = {}
        for name in names:
            # first entry wins when names collide after normalization
            self._canonical.setdefault(self.normalize(name), name)

    @staticmethod
    def normalize(name: str) -> str:
        return _PUNCT_RE.sub("", name.lower())

    def lookup(self, cell: str) -> str | None:
        return self._canonical.get(self.normalize(cell))

    @classmethod
    def from_file(cls, path: str | Path) -> "BenchmarkLexicon":
        text = Path(path).read_text("utf-8")
        return cls([ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")])


def extract_benchmark_tables(card_body: str | None, lexicon: BenchmarkLexicon | None = None) -> list[str]:
    """Benchmark names appearing in the card's markdown pipe tables.

    Each benchmark is recorded once per card, in first-seen order.
    Malformed table rows are simply skipped.
    """
    if not card_body:
        return []
    if lexicon is None:
        lexicon = BenchmarkLexicon()
    found: list[str] = []
    seen: set[str] = set()
    for line in card_body.splitlines():
        stripped = line.strip()
        if not (stripped.startswith("|") and stripped.count("|") >= 2):
            continue
        cells = [c.strip() for c in stripped.strip("|").split("|")]
        for cell in cells:
            if not cell or set(cell) <= set("-: "):
                continue
            name = lexicon.lookup(cell)
            if name and name not in seen:
                seen.add(name)
                found.append(name)
    return found
