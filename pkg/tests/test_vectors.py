import math
import random

import pytest

from unirank.vectors import (
    Bm25,
    RowMatrix,
    SparseVector,
    TfIdf,
    cosine,
    fit,
    load_index,
    save_index,
    scheme_from_name,
    vectorize,
)


def random_vector(rng: random.Random, dim: int = 12) -> SparseVector:
    entries = {
        t: rng.uniform(0.1, 5.0) for t in range(dim) if rng.random() < 0.5
    }
    return SparseVector.from_entries(entries)


class TestFit:
    def test_document_frequencies_and_avgdl(self):
        stats = fit([["a", "b"], ["b", "c"]])
        assert stats.doc_freq == {"a": 1, "b": 2, "c": 1}
        assert stats.doc_count == 2
        assert stats.avg_doc_len == 2.0

    def test_df_counts_documents_not_terms(self):
        stats = fit([["a", "a", "b"]])
        assert stats.doc_freq["a"] == 1

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            fit([])

    def test_term_ids_are_sorted_and_dense(self):
        stats = fit([["c", "a"], ["b"]])
        assert stats.term_ids == {"a": 0, "b": 1, "c": 2}


class TestVectorize:
    def test_tfidf_weight_matches_formula(self):
        stats = fit([["a"], ["b"]])
        vec = vectorize(["a"], stats, TfIdf())
        # 1 * (ln((2+1)/(1+1)) + 1) = ln(1.5) + 1
        expected = 1.4054651081081644
        assert vec.entries[stats.term_ids["a"]] == pytest.approx(expected, abs=1e-12)

    def test_empty_document_gives_zero_vector(self):
        stats = fit([["a"]])
        vec = vectorize([], stats, TfIdf())
        assert vec.entries == {}
        assert vec.norm == 0.0

    def test_bm25_idf_positive_when_term_in_every_document(self):
        stats = fit([["a"], ["a"], ["a", "b"]])
        vec = vectorize(["a"], stats, Bm25())
        n = 3
        weight = vec.entries[stats.term_ids["a"]]
        assert weight > 0.0
        # idf component: ln(1 + 0.5 / (N + 0.5))
        idf = math.log(1 + 0.5 / (n + 0.5))
        tf_part = (1.2 + 1) / (1 + 1.2 * (1 - 0.75 + 0.75 * 1 / stats.avg_doc_len))
        assert weight == pytest.approx(idf * tf_part, abs=1e-12)

    def test_bm25_weight_matches_scalar_oracle(self):
        docs = [["a", "b", "b"], ["b", "c"], ["a", "c", "d", "d"]]
        stats = fit(docs)
        k1, b = 1.5, 0.6
        vec = vectorize(docs[0], stats, Bm25(k1=k1, b=b))
        n, avgdl, doc_len = 3, 9 / 3, 3
        for term, tf in (("a", 1), ("b", 2)):
            df = stats.doc_freq[term]
            idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
            expected = idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * doc_len / avgdl))
            assert vec.entries[stats.term_ids[term]] == pytest.approx(expected, abs=1e-12)

    def test_out_of_vocabulary_terms_ignored(self):
        stats = fit([["a"]])
        vec = vectorize(["a", "zzz"], stats, TfIdf())
        assert set(vec.entries) == {stats.term_ids["a"]}

    def test_deterministic(self):
        docs = [["a", "b"], ["b", "c", "c"]]
        stats = fit(docs)
        for scheme in (TfIdf(), Bm25()):
            assert vectorize(docs[1], stats, scheme) == vectorize(docs[1], stats, scheme)

    def test_no_zero_weight_entries(self):
        rng = random.Random(3)
        docs = [[rng.choice("abcdef") for _ in range(rng.randrange(1, 8))] for _ in range(20)]
        stats = fit(docs)
        for doc in docs:
            for scheme in (TfIdf(), Bm25()):
                assert all(w != 0.0 for w in vectorize(doc, stats, scheme).entries.values())


class TestCosine:
    def test_identical_vectors(self):
        x = SparseVector.from_entries({0: 1.0, 1: 2.0})
        assert cosine(x, x) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_supports(self):
        x = SparseVector.from_entries({0: 1.0})
        y = SparseVector.from_entries({1: 1.0})
        assert cosine(x, y) == 0.0

    def test_half_overlap(self):
        x = SparseVector.from_entries({0: 1.0, 1: 1.0})
        y = SparseVector.from_entries({1: 1.0, 2: 1.0})
        assert cosine(x, y) == pytest.approx(0.5, abs=1e-12)

    def test_zero_norm_gives_zero(self):
        zero = SparseVector.from_entries({})
        x = SparseVector.from_entries({0: 1.0})
        assert cosine(zero, x) == 0.0
        assert cosine(x, zero) == 0.0

    def test_symmetry(self):
        rng = random.Random(5)
        for _ in range(100):
            x, y = random_vector(rng), random_vector(rng)
            assert cosine(x, y) == pytest.approx(cosine(y, x), abs=1e-12)

    def test_scale_invariance(self):
        rng = random.Random(6)
        for _ in range(100):
            x, y = random_vector(rng), random_vector(rng)
            alpha = rng.uniform(0.01, 100.0)
            scaled = SparseVector.from_entries({t: alpha * w for t, w in x.entries.items()})
            assert cosine(scaled, y) == pytest.approx(cosine(x, y), abs=1e-9)

    def test_range(self):
        rng = random.Random(8)
        for _ in range(200):
            value = cosine(random_vector(rng), random_vector(rng))
            assert 0.0 <= value <= 1.0 + 1e-12


def test_cached_norm_matches_recomputation():
    rng = random.Random(9)
    for _ in range(100):
        vec = random_vector(rng)
        recomputed = math.sqrt(sum(w * w for w in vec.entries.values()))
        assert vec.norm == pytest.approx(recomputed, abs=1e-9)


def test_row_matrix_matches_pairwise_cosine():
    rng = random.Random(10)
    vectors = [random_vector(rng) for _ in range(30)]
    vectors.append(SparseVector.from_entries({}))  # zero row stays addressable
    matrix = RowMatrix(vectors)
    for _ in range(20):
        query = random_vector(rng)
        scores = matrix.cosines(query)
        for i, vec in enumerate(vectors):
            assert scores[i] == pytest.approx(cosine(query, vec), abs=1e-12)


class TestSchemes:
    def test_bm25_parameter_validation(self):
        with pytest.raises(ValueError):
            Bm25(k1=0.0)
        with pytest.raises(ValueError):
            Bm25(b=1.5)

    def test_scheme_from_name(self):
        assert scheme_from_name("tfidf") == TfIdf()
        assert scheme_from_name("bm25", k1=2.0, b=0.5) == Bm25(k1=2.0, b=0.5)
        with pytest.raises(ValueError):
            scheme_from_name("dense")


def test_index_persistence_round_trip(tmp_path):
    docs = {"f1": ["a", "b"], "f2": ["b", "c", "c"], "f3": ["d"]}
    stats = fit(list(docs.values()))
    scheme = Bm25(k1=1.4, b=0.6)
    vectors = {uid: vectorize(tokens, stats, scheme) for uid, tokens in docs.items()}
    path = tmp_path / "index.json"
    save_index(path, stats, scheme, vectors)

    loaded_stats, loaded_scheme, loaded_vectors = load_index(path)
    assert loaded_scheme == scheme
    assert loaded_stats.term_ids == stats.term_ids
    assert loaded_stats.doc_freq == stats.doc_freq
    assert loaded_stats.doc_count == stats.doc_count
    assert loaded_stats.avg_doc_len == stats.avg_doc_len
    assert loaded_vectors == vectors


def test_index_rejects_unknown_format(tmp_path):
    path = tmp_path / "index.json"
    path.write_text('{"format": "other/9"}', encoding="utf-8")
    with pytest.raises(ValueError):
        load_index(path)
