"""Explanation reconstruction for science questions.

Ranks a knowledge base of atomic facts for a query hypothesis (question +
candidate answer) by combining lexical relevance with a unification score
derived from the gold explanations of the k most similar training
hypotheses, and evaluates the rankings with Mean Average Precision.
"""

from .corpus import (
    Choice,
    CorpusError,
    Explanation,
    ExplanationKB,
    Fact,
    FactKB,
    Hypothesis,
    InferenceType,
    IngestReport,
    Question,
    Role,
    Split,
    build_explanation_kb,
    build_hypothesis,
    dump_corpus,
    load_corpus,
    parse_fact_tables,
    parse_questions,
)
from .evaluation import (
    EvalReport,
    QuestionGold,
    average_precision,
    build_gold_sets,
    category_map,
    knn_sweep,
    map_by_explanation_length,
    mean_average_precision,
    precision_at_k,
    run_eval,
)
from .ranker import Neighbor, RankedList, RankerConfig, UnificationRanker
from .text import TextPipeline, load_lemma_map, load_stopwords, normalize, tokenize
from .vectors import Bm25, SparseVector, TfIdf, VocabularyStats, cosine, fit, vectorize

__all__ = [
    "Bm25",
    "Choice",
    "CorpusError",
    "EvalReport",
    "Explanation",
    "ExplanationKB",
    "Fact",
    "FactKB",
    "Hypothesis",
    "InferenceType",
    "IngestReport",
    "Neighbor",
    "Question",
    "QuestionGold",
    "RankedList",
    "RankerConfig",
    "Role",
    "SparseVector",
    "Split",
    "TextPipeline",
    "TfIdf",
    "UnificationRanker",
    "VocabularyStats",
    "average_precision",
    "build_explanation_kb",
    "build_gold_sets",
    "build_hypothesis",
    "category_map",
    "cosine",
    "dump_corpus",
    "fit",
    "knn_sweep",
    "load_corpus",
    "load_lemma_map",
    "load_stopwords",
    "map_by_explanation_length",
    "mean_average_precision",
    "normalize",
    "parse_fact_tables",
    "parse_questions",
    "precision_at_k",
    "run_eval",
    "tokenize",
    "vectorize",
]
