import random

import pytest

from unirank.text import (
    TextPipeline,
    load_lemma_map,
    load_stopwords,
    normalize,
    overlap_bucket,
    tokenize,
)

WORKED_HYPOTHESIS = (
    "What is an example of a force producing heat? "
    "two sticks getting warm when rubbed together"
)


def test_tokenize_plain_sentence():
    assert tokenize("friction is a kind of force") == [
        "friction", "is", "a", "kind", "of", "force",
    ]


def test_tokenize_strips_punctuation():
    assert tokenize("objects' surfaces move") == ["objects", "surfaces", "move"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_keeps_digits_and_single_chars():
    assert tokenize("water boils at 100 C.") == ["water", "boils", "at", "100", "c"]


def test_normalize_removes_standard_stopwords():
    stop = load_stopwords()
    assert normalize(["friction", "is", "a", "kind", "of", "force"], stop) == [
        "friction", "kind", "force",
    ]


def test_normalize_empty_stream():
    assert normalize([], load_stopwords()) == []


def test_normalize_applies_lemma_map():
    assert normalize(["two", "sticks"], frozenset(), {"sticks": "stick"}) == ["two", "stick"]


def test_normalize_is_idempotent():
    stop = load_stopwords()
    rng = random.Random(7)
    vocabulary = ["friction", "is", "force", "heats", "heat", "the", "objects", "object", "x9"]
    lemma = {"heats": "heat", "objects": "object"}
    for _ in range(50):
        tokens = [rng.choice(vocabulary) for _ in range(rng.randrange(0, 12))]
        once = normalize(tokens, stop, lemma)
        assert normalize(once, stop, lemma) == once


def test_normalize_idempotent_when_lemma_target_is_stopword():
    # "whilst" -> "while" (a stopword): the token must vanish on the first
    # pass, not survive it and disappear on the second.
    stop = load_stopwords()
    lemma = {"whilst": "while"}
    once = normalize(["whilst", "running"], stop, lemma)
    assert once == ["running"]
    assert normalize(once, stop, lemma) == once


def test_stopword_file_parsing(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment line\nthe\nAND  # inline comment\n\n of\n", encoding="utf-8")
    assert load_stopwords(path) == frozenset({"the", "and", "of"})


def test_lemma_map_resolves_chains_to_fixed_points(tmp_path):
    path = tmp_path / "lemmas.tsv"
    path.write_text("running\trun\nran\trunning\n", encoding="utf-8")
    lemma = load_lemma_map(path)
    assert lemma == {"running": "run", "ran": "run"}
    for surface, target in lemma.items():
        assert lemma.get(target, target) == target


def test_lemma_map_rejects_malformed_line(tmp_path):
    path = tmp_path / "lemmas.tsv"
    path.write_text("running run\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_lemma_map(path)


class TestContentOverlap:
    def test_worked_example_shares_force(self, pipeline):
        count = pipeline.content_overlap_count(
            WORKED_HYPOTHESIS, "friction is a kind of force"
        )
        assert count >= 1

    def test_abstract_fact_has_zero_overlap(self, pipeline):
        count = pipeline.content_overlap_count(
            WORKED_HYPOTHESIS, "friction causes the temperature of an object to increase"
        )
        assert count == 0
        assert overlap_bucket(count) == "0"

    def test_self_overlap_counts_distinct_content_terms(self, pipeline):
        text = "friction is a kind of force and friction causes heat"
        expected = len(pipeline.content_terms(text))
        assert pipeline.content_overlap_count(text, text) == expected

    def test_symmetry(self, pipeline):
        rng = random.Random(11)
        words = ["friction", "force", "heat", "stick", "gravity", "energy", "the", "of"]
        for _ in range(50):
            a = " ".join(rng.choice(words) for _ in range(rng.randrange(0, 10)))
            b = " ".join(rng.choice(words) for _ in range(rng.randrange(0, 10)))
            assert pipeline.content_overlap_count(a, b) == pipeline.content_overlap_count(b, a)

    def test_monotone_under_shared_term_append(self, pipeline):
        a = "friction produces heat"
        b = "surfaces moving against each other"
        before = pipeline.content_overlap_count(a, b)
        assert pipeline.content_overlap_count(a + " surfaces", b) >= before


def test_overlap_buckets_partition_counts():
    assert overlap_bucket(0) == "0"
    assert overlap_bucket(1) == "1"
    assert overlap_bucket(2) == "1+"
    assert overlap_bucket(17) == "1+"


def test_default_pipeline_snapshot():
    pipeline = TextPipeline.default()
    described = pipeline.describe()
    assert described["stopword_count"] > 100
    assert described["lemma_entries"] == 0
