"""Sparse TF-IDF / BM25 vectors and cosine similarity.

Corpus statistics are fitted once over the normalized token streams; both
weighting schemes then produce term-id -> weight maps that are compared
with plain cosine similarity. BM25 weights are treated as vector
components (document-style weighting on both sides), not as the
asymmetric query-scoring function.

Weight formulas:

  tf-idf:  w(t, d) = tf(t, d) * (ln((N + 1) / (df(t) + 1)) + 1)
  bm25:    w(t, d) = idf(t) * tf(t, d) * (k1 + 1)
                     / (tf(t, d) + k1 * (1 - b + b * |d| / avgdl))
           idf(t)  = max(0, ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5)))

``RowMatrix`` holds one vector per document behind an inverted index so a
query can be scored against every row in one accumulation pass; rows are
pre-normalized to unit length, making the scores exact cosines.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

INDEX_FORMAT = "unirank-index/1"


@dataclass(frozen=True)
class TfIdf:
    """Add-one smoothed tf-idf weighting."""

    name = "tfidf"

    def describe(self) -> dict:
        return {"scheme": "tfidf"}


@dataclass(frozen=True)
class Bm25:
    """Okapi-style BM25 weighting with saturation k1 and length-norm b."""

    k1: float = 1.2
    b: float = 0.75

    name = "bm25"

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError(f"bm25 k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"bm25 b must be in [0, 1], got {self.b}")

    def describe(self) -> dict:
        return {"scheme": "bm25", "k1": self.k1, "b": self.b}


WeightingScheme = TfIdf | Bm25


def scheme_from_name(name: str, k1: float = 1.2, b: float = 0.75) -> WeightingScheme:
    name = name.lower()
    if name in ("tfidf", "tf-idf"):
        return TfIdf()
    if name == "bm25":
        return Bm25(k1=k1, b=b)
    raise ValueError(f"unknown weighting scheme: {name!r} (expected 'tfidf' or 'bm25')")


@dataclass(frozen=True)
class VocabularyStats:
    """Document frequencies plus corpus size and average document length."""

    term_ids: dict[str, int]
    doc_freq: dict[str, int]
    doc_count: int
    avg_doc_len: float

    def __post_init__(self):
        if self.doc_count < 1:
            raise ValueError("statistics require at least one document")


def fit(documents: list[list[str]]) -> VocabularyStats:
    """Count document frequencies over tokenized documents.

    Term ids are assigned in sorted term order so identical corpora always
    produce identical statistics.
    """
    if not documents:
        raise ValueError("cannot fit vocabulary statistics on an empty corpus")
    doc_freq: Counter[str] = Counter()
    total_len = 0
    for doc in documents:
        total_len += len(doc)
        doc_freq.update(set(doc))
    term_ids = {term: i for i, term in enumerate(sorted(doc_freq))}
    return VocabularyStats(
        term_ids=term_ids,
        doc_freq=dict(doc_freq),
        doc_count=len(documents),
        avg_doc_len=total_len / len(documents),
    )


@dataclass(frozen=True)
class SparseVector:
    """term-id -> weight map with its Euclidean norm cached."""

    entries: dict[int, float]
    norm: float

    @classmethod
    def from_entries(cls, entries: dict[int, float]) -> "SparseVector":
        entries = {t: w for t, w in entries.items() if w != 0.0}
        return cls(entries=entries, norm=math.sqrt(sum(w * w for w in entries.values())))


def vectorize(doc: list[str], stats: VocabularyStats, scheme: WeightingScheme) -> SparseVector:
    """Weight a tokenized document under the given scheme.

    Out-of-vocabulary terms carry no weight but still count towards the
    document length used by BM25.
    """
    counts = Counter(doc)
    n = stats.doc_count
    entries: dict[int, float] = {}
    if isinstance(scheme, TfIdf):
        for term, tf in counts.items():
            term_id = stats.term_ids.get(term)
            if term_id is None:
                continue
            idf = math.log((n + 1) / (stats.doc_freq[term] + 1)) + 1.0
            entries[term_id] = tf * idf
    else:
        doc_len = len(doc)
        length_norm = scheme.k1 * (1.0 - scheme.b + scheme.b * doc_len / stats.avg_doc_len)
        for term, tf in counts.items():
            term_id = stats.term_ids.get(term)
            if term_id is None:
                continue
            df = stats.doc_freq[term]
            idf = max(0.0, math.log(1.0 + (n - df + 0.5) / (df + 0.5)))
            entries[term_id] = idf * tf * (scheme.k1 + 1.0) / (tf + length_norm)
    return SparseVector.from_entries(entries)


def cosine(x: SparseVector, y: SparseVector) -> float:
    """dot(x, y) / (|x| |y|); 0.0 when either vector has zero norm."""
    if x.norm == 0.0 or y.norm == 0.0:
        return 0.0
    if len(y.entries) < len(x.entries):
        x, y = y, x
    dot = 0.0
    for term_id, w in x.entries.items():
        other = y.entries.get(term_id)
        if other is not None:
            dot += w * other
    return dot / (x.norm * y.norm)


class RowMatrix:
    """Inverted index over a fixed set of sparse vectors for batch cosines.

    Rows with zero norm stay in the matrix (scoring 0 against everything)
    so row indices always line up with the caller's document order.
    """

    def __init__(self, vectors: list[SparseVector]):
        self.n_rows = len(vectors)
        postings: dict[int, tuple[list[int], list[float]]] = {}
        for row, vec in enumerate(vectors):
            if vec.norm == 0.0:
                continue
            inv_norm = 1.0 / vec.norm
            for term_id, w in vec.entries.items():
                rows, weights = postings.setdefault(term_id, ([], []))
                rows.append(row)
                weights.append(w * inv_norm)
        self._postings = {
            t: (np.asarray(rows, dtype=np.intp), np.asarray(ws, dtype=np.float64))
            for t, (rows, ws) in postings.items()
        }

    def cosines(self, query: SparseVector) -> np.ndarray:
        """Cosine of the query against every row, as a dense float array."""
        scores = np.zeros(self.n_rows, dtype=np.float64)
        if query.norm == 0.0:
            return scores
        for term_id, w in query.entries.items():
            posting = self._postings.get(term_id)
            if posting is not None:
                rows, weights = posting
                scores[rows] += w * weights
        scores /= query.norm
        return scores


def save_index(
    path: str | Path,
    stats: VocabularyStats,
    scheme: WeightingScheme,
    vectors: dict[str, SparseVector],
) -> None:
    """Persist fitted statistics plus per-document vectors as versioned JSON."""
    payload = {
        "format": INDEX_FORMAT,
        "scheme": scheme.describe(),
        "stats": {
            "doc_count": stats.doc_count,
            "avg_doc_len": stats.avg_doc_len,
            "terms": {t: [stats.term_ids[t], stats.doc_freq[t]] for t in sorted(stats.term_ids)},
        },
        "vectors": {
            uid: {str(t): w for t, w in sorted(vec.entries.items())}
            for uid, vec in vectors.items()
        },
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")


def load_index(path: str | Path) -> tuple[VocabularyStats, WeightingScheme, dict[str, SparseVector]]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != INDEX_FORMAT:
        raise ValueError(f"unsupported index format: {payload.get('format')!r}")
    raw_scheme = payload["scheme"]
    if raw_scheme["scheme"] == "tfidf":
        scheme: WeightingScheme = TfIdf()
    else:
        scheme = Bm25(k1=raw_scheme["k1"], b=raw_scheme["b"])
    terms = payload["stats"]["terms"]
    stats = VocabularyStats(
        term_ids={t: int(pair[0]) for t, pair in terms.items()},
        doc_freq={t: int(pair[1]) for t, pair in terms.items()},
        doc_count=int(payload["stats"]["doc_count"]),
        avg_doc_len=float(payload["stats"]["avg_doc_len"]),
    )
    vectors = {
        uid: SparseVector.from_entries({int(t): float(w) for t, w in entries.items()})
        for uid, entries in payload["vectors"].items()
    }
    return stats, scheme, vectors
