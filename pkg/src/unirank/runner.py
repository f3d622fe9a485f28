"""Run orchestration: building rankers from normalized corpora, batched
ranking with an optional worker pool, and run manifests.

Every command emits a manifest capturing the effective configuration,
input checksums and per-phase timings. The pipeline itself is free of
randomness, so re-running with the same configuration and inputs
reproduces the ranking and report files byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
import time
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

from .corpus import (
    CorpusError,
    ExplanationKB,
    FactKB,
    IngestReport,
    Question,
    Split,
    build_explanation_kb,
    build_hypothesis,
    load_corpus,
)
from .ranker import RankedList, RankerConfig, UnificationRanker
from .text import TextPipeline, load_lemma_map, load_stopwords

try:
    _VERSION = metadata.version("unirank")
except metadata.PackageNotFoundError:  # running from a source tree
    _VERSION = "0.1.0"


def tool_version() -> str:
    return _VERSION


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class PhaseTimer:
    """Wall-clock seconds per named phase."""

    def __init__(self):
        self.timings: dict[str, float] = {}
        self._starts: dict[str, float] = {}

    def start(self, phase: str) -> None:
        self._starts[phase] = time.perf_counter()

    def stop(self, phase: str) -> float:
        elapsed = time.perf_counter() - self._starts.pop(phase)
        self.timings[phase] = self.timings.get(phase, 0.0) + elapsed
        return elapsed


@dataclass
class RunManifest:
    """Reproducibility record emitted with every run."""

    command: str
    config: dict
    preprocessing: dict
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    timings_s: dict[str, float] = field(default_factory=dict)
    warnings: int = 0
    version: str = field(default_factory=tool_version)

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def write(self, path: str | Path) -> None:
        payload = {
            "tool": "unirank",
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "preprocessing": self.preprocessing,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timings_s": {k: round(v, 6) for k, v in self.timings_s.items()},
            "warnings": self.warnings,
        }
        Path(path).write_text(
            json.dumps(payload, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
        )


def build_pipeline(stopwords: str | None = "default", lemmas: str | None = None) -> TextPipeline:
    """Construct the text pipeline from CLI-style settings.

    ``stopwords`` is "default", "none", or a file path; ``lemmas`` is an
    optional lemma-map file path.
    """
    if stopwords == "none":
        stop = frozenset()
    elif stopwords in (None, "default"):
        stop = load_stopwords()
    else:
        stop = load_stopwords(stopwords)
    lemma_map = load_lemma_map(lemmas) if lemmas else None
    return TextPipeline(stopwords=stop, lemma_map=lemma_map)


def load_train_bank(
    train_path: str | Path, fact_kb: FactKB
) -> tuple[ExplanationKB, IngestReport]:
    """Load the train split and build the explanation bank against a fact KB."""
    _, train_questions, split = load_corpus(train_path)
    if split is not Split.TRAIN:
        raise CorpusError(f"{train_path}: expected a train-split corpus, found {split.value}")
    annotated = [q for q in train_questions if q.explanation is not None]
    return build_explanation_kb(annotated, fact_kb)


def build_ranker(
    corpus_path: str | Path,
    train_path: str | Path | None,
    pipeline: TextPipeline,
    config: RankerConfig,
) -> tuple[UnificationRanker, list[Question], Split, IngestReport]:
    """Assemble a ranker plus the query questions from normalized corpora.

    Without a train corpus the explanation bank is empty, which is only
    meaningful for pure-relevance runs (lambda1 = 1).
    """
    fact_kb, questions, split = load_corpus(corpus_path)
    report = IngestReport()
    if train_path is not None:
        ekb, report = load_train_bank(train_path, fact_kb)
    else:
        if config.lambda1 < 1.0:
            raise CorpusError(
                "a train corpus is required to compute unification scores "
                "(lambda1 < 1); pass --train or use lambda1=1.0"
            )
        ekb = ExplanationKB(pairs=())
    ranker = UnificationRanker(fact_kb, ekb, pipeline, config)
    return ranker, questions, split, report


# ---------------------------------------------------------------------------
# Batched ranking

_worker_ranker: UnificationRanker | None = None
_worker_questions: list[Question] | None = None


def _pool_init(ranker: UnificationRanker, questions: list[Question]) -> None:
    global _worker_ranker, _worker_questions
    _worker_ranker = ranker
    _worker_questions = questions


def _pool_rank(index: int) -> RankedList:
    question = _worker_questions[index]
    return _worker_ranker.combined_ranking(build_hypothesis(question, question.answer_key))


def batch_rank(
    ranker: UnificationRanker,
    questions: list[Question],
    workers: int | None = None,
) -> tuple[list[RankedList], float]:
    """Rank each question's correct-answer hypothesis; returns the lists in
    input order plus the mean per-question wall-clock latency.

    Workers share the immutable ranker through fork; on platforms without
    fork the ranking falls back to sequential execution.
    """
    workers = workers if workers is not None else (os.cpu_count() or 1)
    start = time.perf_counter()
    if workers > 1 and len(questions) > 1 and "fork" in multiprocessing.get_all_start_methods():
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(
            processes=min(workers, len(questions)),
            initializer=_pool_init,
            initargs=(ranker, questions),
        ) as pool:
            ranked = pool.map(_pool_rank, range(len(questions)), chunksize=8)
    else:
        ranked = [
            ranker.combined_ranking(build_hypothesis(q, q.answer_key)) for q in questions
        ]
    elapsed = time.perf_counter() - start
    return ranked, elapsed / max(1, len(questions))


def resolve_path(path: str, env_var: str = "UNIRANK_CORPUS_ROOT") -> Path:
    """Resolve an input path, falling back to the corpus-root env var."""
    p = Path(path)
    if p.exists():
        return p
    root = os.environ.get(env_var)
    if root and (Path(root) / path).exists():
        return Path(root) / path
    return p
