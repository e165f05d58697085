import math
import random
from datetime import datetime, timezone

import pytest

from ptmcat.filters.dedup import (
    EmptyCorpus,
    cluster_duplicates,
    cosine,
    tokenize,
    vectorize_corpus,
)
from ptmcat.ingest.records import ModelRecord


def brute_force_cosine(body_a: str, body_b: str, corpus: list[tuple[str, str]]) -> float:
    """Independent all-pairs oracle: recompute tf-idf from scratch."""
    n = len(corpus)
    df = {}
    for _, body in corpus:
        for t in set(tokenize(body)):
            df[t] = df.get(t, 0) + 1

    def vector(body):
        tf = {}
        for t in tokenize(body):
            tf[t] = tf.get(t, 0) + 1
        w = {t: c * (math.log((1 + n) / (1 + df[t])) + 1) for t, c in tf.items()}
        norm = math.sqrt(sum(x * x for x in w.values()))
        return {t: x / norm for t, x in w.items()} if norm else {}

    va, vb = vector(body_a), vector(body_b)
    return sum(w * vb.get(t, 0.0) for t, w in va.items())


def rec(model_id, created=None):
    ts = datetime.fromisoformat(created).replace(tzinfo=timezone.utc) if created else None
    return ModelRecord(model_id=model_id, created_at=ts)


FIXTURE_CORPUS = [
    ("d/1", "apple banana apple"),
    ("d/2", "banana cherry"),
    ("d/3", "durian"),
]


def test_tfidf_matches_hand_computed_table():
    vectors = vectorize_corpus(FIXTURE_CORPUS)
    d1 = vectors.vectors["d/1"]
    assert d1["apple"] == pytest.approx(0.9347019636, abs=1e-9)
    assert d1["banana"] == pytest.approx(0.3554324679, abs=1e-9)
    d2 = vectors.vectors["d/2"]
    assert d2["banana"] == pytest.approx(0.6053485081, abs=1e-9)
    assert d2["cherry"] == pytest.approx(0.7959605416, abs=1e-9)
    assert cosine(d1, d2) == pytest.approx(0.2151605141, abs=1e-9)


def test_identical_bodies_identical_vectors():
    vectors = vectorize_corpus([("a", "same words here"), ("b", "same words here")])
    assert vectors.vectors["a"] == vectors.vectors["b"]
    assert cosine(vectors.vectors["a"], vectors.vectors["b"]) == pytest.approx(1.0, abs=1e-9)


def test_disjoint_vocabulary_cosine_zero():
    vectors = vectorize_corpus([("a", "alpha beta"), ("b", "gamma delta")])
    assert cosine(vectors.vectors["a"], vectors.vectors["b"]) == 0.0


def test_empty_body_flagged_unclusterable():
    vectors = vectorize_corpus([("a", "word"), ("b", "   ")])
    assert vectors.unclusterable == {"b"}
    assert vectors.vectors["b"] == {}


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        vectorize_corpus([])
    with pytest.raises(EmptyCorpus):
        vectorize_corpus([("a", ""), ("b", "  ")])


def test_cosine_symmetry_and_selfsim():
    corpus = [("a", "x y z x"), ("b", "y z q"), ("c", "q r s")]
    vectors = vectorize_corpus(corpus)
    for i, _ in corpus:
        assert cosine(vectors.vectors[i], vectors.vectors[i]) == pytest.approx(1.0, abs=1e-9)
        for j, _ in corpus:
            assert cosine(vectors.vectors[i], vectors.vectors[j]) == pytest.approx(
                cosine(vectors.vectors[j], vectors.vectors[i]), abs=1e-12
            )


def test_all_pairs_match_brute_force_oracle_20_cards():
    rng = random.Random(7)
    vocab = [f"w{k}" for k in range(40)]
    corpus = []
    for i in range(18):
        words = [rng.choice(vocab) for _ in range(rng.randint(3, 30))]
        corpus.append((f"c/{i:02}", " ".join(words)))
    # two near-identical cards to get a high-similarity pair in range
    base = " ".join(rng.choice(vocab) for _ in range(60))
    corpus.append(("c/18", base + " modelx"))
    corpus.append(("c/19", base + " modely"))
    assert len(corpus) == 20

    vectors = vectorize_corpus(corpus)
    bodies = dict(corpus)
    for i, (id_a, _) in enumerate(corpus):
        for id_b, _ in corpus[i + 1 :]:
            fast = cosine(vectors.vectors[id_a], vectors.vectors[id_b])
            slow = brute_force_cosine(bodies[id_a], bodies[id_b], corpus)
            assert fast == pytest.approx(slow, abs=1e-9)


def test_name_variation_clusters_and_distinct_stays_out():
    base = (
        "this model card describes a fine tuned network for classification with training "
        "details evaluation numbers limitations and usage guidance for downstream work "
        "including deployment notes and acknowledgements for the community "
    ) * 6
    corpus = [
        ("d/orig", base + " modelalpha"),
        ("d/var", base + " modelbeta"),
        ("d/other", "completely different text about gardening tips and tomato varieties"),
    ]
    records = [rec("d/orig", "2023-01-01T00:00:00"), rec("d/var", "2024-01-01T00:00:00"), rec("d/other", "2022-01-01T00:00:00")]
    vectors = vectorize_corpus(corpus)
    clusters = cluster_duplicates(vectors, records, threshold=0.99)
    assert len(clusters) == 1
    cluster = clusters[0]
    assert cluster.original == "d/orig"
    assert [m for m, _ in cluster.variants] == ["d/var"]
    assert all(sim >= 0.99 for _, sim in cluster.variants)
    assert "d/other" not in cluster.members()


def test_threshold_one_requires_identical():
    corpus = [("a", "same text body"), ("b", "same text body"), ("c", "same text bodyx")]
    records = [rec("a", "2020-01-01T00:00:00"), rec("b", "2021-01-01T00:00:00"), rec("c", "2022-01-01T00:00:00")]
    clusters = cluster_duplicates(vectorize_corpus(corpus), records, threshold=1.0)
    assert len(clusters) == 1
    assert clusters[0].members() == {"a", "b"}


def test_original_earliest_with_lexicographic_tiebreak():
    corpus = [("z/later-name", "identical body"), ("a/earlier-name", "identical body")]
    records = [rec("z/later-name", "2020-05-05T00:00:00"), rec("a/earlier-name", "2020-05-05T00:00:00")]
    clusters = cluster_duplicates(vectorize_corpus(corpus), records)
    assert clusters[0].original == "a/earlier-name"


def test_undated_member_never_original():
    corpus = [("a/undated", "identical body"), ("b/dated", "identical body")]
    records = [rec("a/undated"), rec("b/dated", "2024-01-01T00:00:00")]
    clusters = cluster_duplicates(vectorize_corpus(corpus), records)
    assert clusters[0].original == "b/dated"


def test_clusters_pairwise_disjoint_and_deterministic():
    rng = random.Random(11)
    base1 = " ".join(rng.choice("abcdefgh") for _ in range(80))
    base2 = " ".join(rng.choice("qrstuvwx") for _ in range(80))
    corpus = [
        ("g/1", base1 + " one"),
        ("g/2", base1 + " two"),
        ("g/3", base2 + " one"),
        ("g/4", base2 + " two"),
        ("g/5", "standalone body with its own words"),
    ]
    records = [rec(f"g/{i}", f"202{i}-01-01T00:00:00") for i in range(1, 6)]
    vectors = vectorize_corpus(corpus)
    c1 = cluster_duplicates(vectors, records)
    c2 = cluster_duplicates(vectors, records)
    assert c1 == c2
    seen: set[str] = set()
    for cluster in c1:
        members = cluster.members()
        assert not (members & seen)
        seen |= members


def test_invalid_threshold_rejected():
    vectors = vectorize_corpus([("a", "x")])
    with pytest.raises(ValueError):
        cluster_duplicates(vectors, [rec("a")], threshold=0.0)
    with pytest.raises(ValueError):
        cluster_duplicates(vectors, [rec("a")], threshold=1.5)
