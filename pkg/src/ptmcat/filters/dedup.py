"""Near-identical card detection: tf-idf vectors, cosine similarity, clustering."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..ingest.records import ModelRecord

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_THRESHOLD = 0.99

_LATEST = datetime.max.replace(tzinfo=timezone.utc)


class EmptyCorpus(Exception):
    pass


@dataclass
class DocVectors:
    """Unit-normalized tf-idf vectors over lowercased unigram tokens.

    tf is the raw term count; idf(t) = ln((1 + N) / (1 + df(t))) + 1 with N
    counting every document in the corpus. Documents with empty bodies get
    zero vectors and are flagged unclusterable.
    """

    ids: list[str]
    vectors: dict[str, dict[str, float]]
    unclusterable: set[str] = field(default_factory=set)


@dataclass(frozen=True)
class DuplicateCluster:
    original: str
    variants: tuple[tuple[str, float], ...]  # (model_id, strongest-link similarity)
    basis: str = "card_body"

    def members(self) -> set[str]:
        return {self.original} | {m for m, _ in self.variants}


def tokenize(body: str) -> list[str]:
    return [t.lower() for t in _TOKEN_RE.findall(body)]


def vectorize_corpus(cards: list[tuple[str, str]]) -> DocVectors:
    if not cards or all(not (body or "").strip() for _, body in cards):
        raise EmptyCorpus("need at least one non-empty card body")
    n_docs = len(cards)
    counts: dict[str, dict[str, int]] = {}
    df: dict[str, int] = {}
    ids = []
    for model_id, body in cards:
        ids.append(model_id)
        tf: dict[str, int] = {}
        for token in tokenize(body or ""):
            tf[token] = tf.get(token, 0) + 1
        counts[model_id] = tf
        for token in tf:
            df[token] = df.get(token, 0) + 1
    idf = {t: math.log((1 + n_docs) / (1 + d)) + 1.0 for t, d in df.items()}

    vectors: dict[str, dict[str, float]] = {}
    unclusterable: set[str] = set()
    for model_id in ids:
        weights = {t: c * idf[t] for t, c in counts[model_id].items()}
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm == 0.0:
            vectors[model_id] = {}
            unclusterable.add(model_id)
        else:
            vectors[model_id] = {t: w / norm for t, w in weights.items()}
    return DocVectors(ids=ids, vectors=vectors, unclusterable=unclusterable)


def cosine(u: dict[str, float], v: dict[str, float]) -> float:
    if len(v) < len(u):
        u, v = v, u
    return sum(w * v[t] for t, w in u.items() if t in v)


def cluster_duplicates(
    vectors: DocVectors,
    records: list[ModelRecord],
    threshold: float = DEFAULT_THRESHOLD,
) -> list[DuplicateCluster]:
    """Group cards whose pairwise cosine reaches the threshold (inclusive).

    Clusters are connected components of the similarity graph. The member
    with the earliest created_at is the original (ties break on model_id);
    a variant's reported similarity is its strongest link into the cluster.
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    created = {r.model_id: r.created_at for r in records}
    ids = [i for i in vectors.ids if i not in vectors.unclusterable]

    # only docs sharing a token can have nonzero cosine
    by_token: dict[str, list[int]] = {}
    for idx, model_id in enumerate(ids):
        for token in vectors.vectors[model_id]:
            by_token.setdefault(token, []).append(idx)

    parent = list(range(len(ids)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    sims: dict[tuple[int, int], float] = {}
    candidate_pairs: set[tuple[int, int]] = set()
    for token_docs in by_token.values():
        if len(token_docs) < 2:
            continue
        for i in range(len(token_docs)):
            for j in range(i + 1, len(token_docs)):
                candidate_pairs.add((token_docs[i], token_docs[j]))
    for a, b in sorted(candidate_pairs):
        sim = cosine(vectors.vectors[ids[a]], vectors.vectors[ids[b]])
        sims[(a, b)] = sim
        if sim >= threshold:
            union(a, b)

    components: dict[int, list[int]] = {}
    for idx in range(len(ids)):
        components.setdefault(find(idx), []).append(idx)

    clusters = []
    for members in components.values():
        if len(members) < 2:
            continue
        member_ids = [ids[i] for i in members]
        original = min(
            member_ids,
            key=lambda m: (created.get(m) or _LATEST, m),
        )
        variants = []
        for idx in members:
            model_id = ids[idx]
            if model_id == original:
                continue
            strongest = max(
                sims.get((min(idx, other), max(idx, other)), 0.0)
                for other in members
                if other != idx
            )
            variants.append((model_id, strongest))
        variants.sort()
        clusters.append(DuplicateCluster(original=original, variants=tuple(variants)))
    clusters.sort(key=lambda c: c.original)
    return clusters
