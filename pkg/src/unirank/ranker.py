"""Joint relevance + unification ranking of the fact knowledge base.

For a query hypothesis h the ranker produces one score per fact f:

  combined(f) = lambda1 * rs_hat(f) + (1 - lambda1) * us_hat(f)

  rs(f) = cosine(vec(h), vec(f))                       lexical relevance
  us(f) = sum over the k nearest annotated hypotheses  unification score
          z of sim(h, z) * [f in explanation(z)]

Nearest neighbours are the top-k hypotheses of the explanation bank under
cosine similarity of their sparse vectors; a bank entry whose text is
byte-identical to the query is excluded so the ranker never looks up its
own gold explanation. Because the raw unification score is a sum over up
to k similarities while relevance is a single cosine, both components are
max-normalized per query before mixing (the ``none`` setting keeps raw
scales for ablation).

Rankings are fully deterministic: strictly descending combined score with
ties broken by fact uid ascending.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

import numpy as np

from .corpus import Explanation, ExplanationKB, FactKB, Hypothesis
from .text import TextPipeline
from .vectors import (
    Bm25,
    RowMatrix,
    SparseVector,
    TfIdf,
    VocabularyStats,
    WeightingScheme,
    cosine,
    fit,
    scheme_from_name,
    vectorize,
)

DEFAULT_LAMBDA1 = 0.83
DEFAULT_K = 100


@dataclass(frozen=True)
class RankerConfig:
    """Scoring-model settings; defaults are the tuned operating point."""

    lambda1: float = DEFAULT_LAMBDA1
    k: int = DEFAULT_K
    rs_scheme: WeightingScheme = field(default_factory=Bm25)
    us_scheme: WeightingScheme = field(default_factory=Bm25)
    normalization: str = "max"  # "max" (per-query max) or "none"
    fit_scope: str = "facts+train"  # or "facts"

    def __post_init__(self):
        if not 0.0 <= self.lambda1 <= 1.0:
            raise ValueError(f"lambda1 must be in [0, 1], got {self.lambda1}")
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.normalization not in ("max", "none"):
            raise ValueError(f"normalization must be 'max' or 'none', got {self.normalization!r}")
        if self.fit_scope not in ("facts+train", "facts"):
            raise ValueError(f"fit_scope must be 'facts+train' or 'facts', got {self.fit_scope!r}")

    def describe(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "k": self.k,
            "rs_scheme": self.rs_scheme.describe(),
            "us_scheme": self.us_scheme.describe(),
            "normalization": self.normalization,
            "fit_scope": self.fit_scope,
        }

    @property
    def model_name(self) -> str:
        if self.lambda1 == 1.0:
            return f"rs_{self.rs_scheme.name}"
        if self.lambda1 == 0.0:
            return f"us_{self.us_scheme.name}"
        return f"rs_{self.rs_scheme.name}+us_{self.us_scheme.name}"


def config_from_dict(raw: dict) -> RankerConfig:
    """Build a config from the JSON config-file representation."""
    kwargs: dict = {}
    if "lambda1" in raw:
        kwargs["lambda1"] = float(raw["lambda1"])
    if "k" in raw:
        kwargs["k"] = int(raw["k"])
    for key in ("rs_scheme", "us_scheme"):
        if key in raw:
            spec = raw[key]
            if isinstance(spec, str):
                kwargs[key] = scheme_from_name(spec)
            else:
                kwargs[key] = scheme_from_name(
                    spec["scheme"], k1=spec.get("k1", 1.2), b=spec.get("b", 0.75)
                )
    if "normalization" in raw:
        kwargs["normalization"] = raw["normalization"]
    if "fit_scope" in raw:
        kwargs["fit_scope"] = raw["fit_scope"]
    return RankerConfig(**kwargs)


def load_config(path: str | Path) -> RankerConfig:
    return config_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class Neighbor:
    """One explanation-bank entry retrieved for a query hypothesis."""

    hypothesis: Hypothesis
    explanation: Explanation
    similarity: float


@dataclass(frozen=True)
class RankedList:
    """Every fact of the KB ordered by combined score (ties: uid ascending).

    Raw component scores are kept alongside the combined score so reports
    can show what drove each rank.
    """

    query_qid: str
    uids: tuple[str, ...]
    combined: tuple[float, ...]
    rs_raw: tuple[float, ...]
    us_raw: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.uids)

    def records(self) -> Iterator[tuple[str, float, float, float]]:
        return zip(self.uids, self.combined, self.rs_raw, self.us_raw)

    def rank_of(self, uid: str) -> int:
        """1-based rank of a fact uid."""
        return self.uids.index(uid) + 1


class UnificationRanker:
    """Immutable indices over one fact KB + explanation bank; pure queries.

    Construction fits vocabulary statistics (over the facts, optionally
    plus the bank's hypothesis texts) and precomputes row matrices for
    both scheme sides. After that every ranking call is a read-only
    operation, safe to fan out across workers.
    """

    def __init__(
        self,
        fact_kb: FactKB,
        explanation_kb: ExplanationKB,
        pipeline: TextPipeline,
        config: RankerConfig,
    ):
        self.fact_kb = fact_kb
        self.explanation_kb = explanation_kb
        self.pipeline = pipeline
        self.config = config

        facts = sorted(fact_kb.facts(), key=lambda f: f.uid)
        self.fact_uids: list[str] = [f.uid for f in facts]
        self._uid_to_row = {uid: i for i, uid in enumerate(self.fact_uids)}

        fact_tokens = [pipeline.tokens(f.text) for f in facts]
        pair_tokens = [pipeline.tokens(h.text) for h, _ in explanation_kb.pairs]
        if config.fit_scope == "facts+train":
            self.stats: VocabularyStats = fit(fact_tokens + pair_tokens)
        else:
            self.stats = fit(fact_tokens)

        self._fact_vectors = [vectorize(t, self.stats, config.rs_scheme) for t in fact_tokens]
        self._fact_matrix = RowMatrix(self._fact_vectors)

        self._pair_vectors = [vectorize(t, self.stats, config.us_scheme) for t in pair_tokens]
        self._pair_matrix = RowMatrix(self._pair_vectors)
        self._pair_fact_rows = [
            np.asarray(
                sorted(self._uid_to_row[uid] for uid in expl.uids() if uid in self._uid_to_row),
                dtype=np.intp,
            )
            for _, expl in explanation_kb.pairs
        ]

    # -- component scores ---------------------------------------------------

    def _query_vector(self, h: Hypothesis, scheme: WeightingScheme) -> SparseVector:
        return vectorize(self.pipeline.tokens(h.text), self.stats, scheme)

    def fact_vector(self, uid: str) -> SparseVector:
        return self._fact_vectors[self._uid_to_row[uid]]

    def _relevance_array(self, h: Hypothesis) -> np.ndarray:
        return self._fact_matrix.cosines(self._query_vector(h, self.config.rs_scheme))

    def relevance_scores(self, h: Hypothesis) -> dict[str, float]:
        """Cosine of the hypothesis against every fact, keyed by uid."""
        scores = self._relevance_array(h)
        return {uid: float(scores[i]) for i, uid in enumerate(self.fact_uids)}

    def _neighbor_order(self, h: Hypothesis) -> tuple[list[int], np.ndarray]:
        """All bank entries ordered by similarity desc (ties: qid asc),
        with entries byte-identical to the query text excluded."""
        sims = self._pair_matrix.cosines(self._query_vector(h, self.config.us_scheme))
        order = sorted(
            range(len(sims)),
            key=lambda i: (-sims[i], self.explanation_kb.pairs[i][0].source_qid),
        )
        order = [i for i in order if self.explanation_kb.pairs[i][0].text != h.text]
        return order, sims

    def knn_hypotheses(self, h: Hypothesis, k: int | None = None) -> list[Neighbor]:
        """The k most similar annotated hypotheses (fewer if the bank is small)."""
        k = self.config.k if k is None else k
        order, sims = self._neighbor_order(h)
        return [
            Neighbor(
                hypothesis=self.explanation_kb.pairs[i][0],
                explanation=self.explanation_kb.pairs[i][1],
                similarity=float(sims[i]),
            )
            for i in order[:k]
        ]

    def unification_scores(self, h: Hypothesis, neighbors: list[Neighbor]) -> dict[str, float]:
        """Similarity-weighted membership count over the neighbours' explanations."""
        us = np.zeros(len(self.fact_uids), dtype=np.float64)
        for nb in neighbors:
            rows = [
                self._uid_to_row[uid] for uid in sorted(nb.explanation.uids())
                if uid in self._uid_to_row
            ]
            us[rows] += nb.similarity
        return {uid: float(us[i]) for i, uid in enumerate(self.fact_uids)}

    def _unification_array(self, h: Hypothesis, k: int) -> np.ndarray:
        us = np.zeros(len(self.fact_uids), dtype=np.float64)
        order, sims = self._neighbor_order(h)
        for i in order[:k]:
            us[self._pair_fact_rows[i]] += sims[i]
        return us

    # -- combination ---------------------------------------------------------

    @staticmethod
    def _max_normalize(scores: np.ndarray) -> np.ndarray:
        top = scores.max() if len(scores) else 0.0
        return scores / top if top > 0.0 else scores

    def combined_ranking(self, h: Hypothesis, k: int | None = None) -> RankedList:
        """Full ranking of the fact KB under the joint score."""
        k = self.config.k if k is None else k
        rs = self._relevance_array(h)
        us = self._unification_array(h, k)
        if self.config.normalization == "max":
            rs_hat, us_hat = self._max_normalize(rs), self._max_normalize(us)
        else:
            rs_hat, us_hat = rs, us
        lam = self.config.lambda1
        combined = lam * rs_hat + (1.0 - lam) * us_hat
        # Facts are stored uid-ascending, so a stable sort on the negated
        # score realizes the uid tie-break for free.
        order = np.argsort(-combined, kind="stable")
        return RankedList(
            query_qid=h.source_qid,
            uids=tuple(self.fact_uids[i] for i in order),
            combined=tuple(float(combined[i]) for i in order),
            rs_raw=tuple(float(rs[i]) for i in order),
            us_raw=tuple(float(us[i]) for i in order),
        )

    def explain_topk(self, h: Hypothesis, top_k: int) -> list[str]:
        """The first top_k fact uids of the combined ranking."""
        if top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {top_k}")
        return list(self.combined_ranking(h).uids[:top_k])

    def with_config(self, **changes) -> "UnificationRanker":
        """Rebuild only what a config change requires (k/lambda1 reuse indices)."""
        new_config = replace(self.config, **changes)
        light = {"lambda1", "k", "normalization"}
        if set(changes) <= light:
            clone = object.__new__(UnificationRanker)
            clone.__dict__.update(self.__dict__)
            clone.config = new_config
            return clone
        return UnificationRanker(self.fact_kb, self.explanation_kb, self.pipeline, new_config)


def pure_relevance_ranking(ranker: UnificationRanker, h: Hypothesis) -> list[str]:
    """Reference RS-only permutation: sort by (-rs, uid)."""
    rs = ranker.relevance_scores(h)
    return sorted(rs, key=lambda uid: (-rs[uid], uid))


def pure_unification_ranking(ranker: UnificationRanker, h: Hypothesis) -> list[str]:
    """Reference US-only permutation: sort by (-us, uid)."""
    us = ranker.unification_scores(h, ranker.knn_hypotheses(h))
    return sorted(us, key=lambda uid: (-us[uid], uid))
