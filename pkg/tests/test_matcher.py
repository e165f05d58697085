import random

from ptmcat.matcher import find_hits, write_hits, read_hits
from ptmcat.taxonomy import SeActivity, SeTask, Taxonomy
from ptmcat.textprep import SourceField


def window_oracle(doc, taxonomy, model_id):
    """Brute-force scan of every token window; the reference for find_hits."""
    lemmas = doc.lemmas
    found = set()
    for task in taxonomy.tasks:
        phrase = task.prepared_phrase
        for i in range(len(lemmas) - len(phrase) + 1):
            if lemmas[i : i + len(phrase)] == phrase:
                found.add((model_id, task.name, task.activity, i, i + len(phrase) - 1))
    return found


def hits_as_set(hits):
    return {(h.model_id, h.task.name, h.task.activity, *h.token_span) for h in hits}


def make_taxonomy(phrases):
    activities = list(SeActivity)
    tasks = []
    for i, phrase in enumerate(phrases):
        tasks.append(
            SeTask(name=phrase, activity=activities[i % len(activities)], prepared_phrase=tuple(phrase.split()))
        )
    return Taxonomy(tasks=tuple(tasks), version="test")


def test_basic_match(taxonomy, normalizer):
    doc = normalizer.prepare("This model does code generation for tests")
    names = {h.task.name for h in find_hits(doc, taxonomy, "m")}
    assert "code generation" in names


def test_wrong_order_no_hit(taxonomy, normalizer):
    doc = normalizer.prepare("generation of code")
    assert "code generation" not in {h.task.name for h in find_hits(doc, taxonomy, "m")}


def test_non_contiguous_no_hit(taxonomy, normalizer):
    doc = normalizer.prepare("code that helps generation")
    assert "code generation" not in {h.task.name for h in find_hits(doc, taxonomy, "m")}


def test_embedded_token_no_hit(normalizer):
    taxonomy = make_taxonomy(["code"])
    doc = normalizer.prepare("decode the message")
    assert find_hits(doc, taxonomy, "m") == []


def test_inflection_matches(taxonomy, normalizer):
    doc = normalizer.prepare("useful for debugging broken builds")
    assert "debugging" in {h.task.name for h in find_hits(doc, taxonomy, "m")}


def test_char_span_covers_tokens(taxonomy, normalizer):
    text = "supports code generation today"
    doc = normalizer.prepare(text)
    hit = next(h for h in find_hits(doc, taxonomy, "m") if h.task.name == "code generation")
    start, end = hit.char_span
    assert text[start:end] == "code generation"
    assert hit.token_span == (1, 2)


def test_multiple_occurrences_all_reported(normalizer):
    taxonomy = make_taxonomy(["a b"])
    doc = normalizer.prepare("a b a b a")
    hits = find_hits(doc, taxonomy, "m")
    assert [h.token_span for h in hits] == [(0, 1), (2, 3)]


def test_overlapping_tasks_all_reported(normalizer):
    taxonomy = make_taxonomy(["a b", "b c", "a b c"])
    doc = normalizer.prepare("a b c")
    names = sorted(h.task.name for h in find_hits(doc, taxonomy, "m"))
    assert names == ["a b", "a b c", "b c"]


def test_matches_cross_line_boundaries(normalizer):
    taxonomy = make_taxonomy(["code generation"])
    doc = normalizer.prepare("code\ngeneration")
    assert len(find_hits(doc, taxonomy, "m")) == 1


def test_monotonic_under_append(taxonomy, normalizer):
    base = "a tool for code generation"
    doc1 = normalizer.prepare(base)
    doc2 = normalizer.prepare(base + " and much more text with debugging")
    spans1 = hits_as_set(find_hits(doc1, taxonomy, "m"))
    spans2 = hits_as_set(find_hits(doc2, taxonomy, "m"))
    assert spans1 <= spans2


def test_oracle_equivalence_randomized(normalizer):
    rng = random.Random(4242)
    vocab = ["code", "test", "log", "bug", "gen", "fix", "run", "data", "api", "x"]
    for trial in range(2000):
        n_phrases = rng.randint(1, 6)
        phrases = set()
        while len(phrases) < n_phrases:
            length = rng.randint(1, 3)
            phrases.add(" ".join(rng.choice(vocab) for _ in range(length)))
        taxonomy = make_taxonomy(sorted(phrases))
        words = [rng.choice(vocab) for _ in range(rng.randint(0, 25))]
        doc = normalizer.prepare(" ".join(words))
        got = hits_as_set(find_hits(doc, taxonomy, "m"))
        expected = window_oracle(doc, taxonomy, "m")
        assert got == expected, (phrases, words)


def test_hit_dump_round_trip(taxonomy, normalizer, tmp_path):
    doc = normalizer.prepare("code generation and debugging")
    hits = find_hits(doc, taxonomy, "model/x")
    path = tmp_path / "hits.tsv"
    write_hits(hits, path)
    rows = read_hits(path, taxonomy)
    assert len(rows) == len(hits)
    assert rows[0][0] == "model/x"
    assert rows[0][3] is SourceField.CARD_BODY
