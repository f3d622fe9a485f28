"""Ranking metrics and the ablation/report machinery.

Scores rankings with Mean Average Precision and Precision@K, overall and
restricted to gold-fact categories (explanatory role, lexical-overlap
bucket, inference type), plus MAP by gold-explanation length and the
neighbour-count sweep. Restricted scoring keeps the ranking untouched and
simply shrinks the gold set: non-bucket gold facts count as non-relevant.

Questions without gold annotations are excluded from every mean (with a
diagnostic), never scored as zero. A gold fact that is absent from a
(truncated) ranking keeps its worst-case rank: it contributes nothing to
average precision and the scorer warns about it.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import FactKB, InferenceType, Question, Role, build_hypothesis
from .ranker import RankedList, UnificationRanker
from .text import TextPipeline, overlap_bucket

REPORT_FORMAT = "unirank-report/1"

DEFAULT_PRECISION_KS = (1, 2, 3, 5, 10, 20, 50, 100)
DEFAULT_LENGTH_BINS = tuple([(n, n) for n in range(1, 10)] + [(10, None)])

ROLE_BUCKETS = (Role.CENTRAL, Role.GROUNDING, Role.LEXICAL_GLUE)
INFERENCE_BUCKETS = (
    InferenceType.RETRIEVAL,
    InferenceType.INFERENCE_SUPPORTING,
    InferenceType.COMPLEX_INFERENCE,
)


@dataclass(frozen=True)
class GoldFact:
    uid: str
    role: Role
    inference_type: InferenceType
    overlap: str  # "0", "1" or "1+"


@dataclass(frozen=True)
class QuestionGold:
    """Gold explanation facts for one question, with bucket attributes."""

    qid: str
    facts: tuple[GoldFact, ...]

    def uids(self) -> set[str]:
        return {f.uid for f in self.facts}

    def bucket_uids(self, kind: str, bucket) -> set[str]:
        if kind == "role":
            return {f.uid for f in self.facts if f.role is bucket}
        if kind == "overlap":
            return {f.uid for f in self.facts if f.overlap == bucket}
        if kind == "inference":
            return {f.uid for f in self.facts if f.inference_type is bucket}
        raise ValueError(f"unknown bucket kind {kind!r}")

    def __len__(self) -> int:
        return len(self.facts)


def build_gold_sets(
    questions: list[Question],
    fact_kb: FactKB,
    pipeline: TextPipeline,
) -> tuple[list[QuestionGold], list[str]]:
    """Attach role / inference-type / overlap-bucket attributes to gold facts.

    Questions without annotations are dropped; gold uids that do not
    resolve in the fact KB are dropped per-fact. Both produce warnings.
    """
    gold_sets = []
    warnings = []
    for question in questions:
        if question.explanation is None or len(question.explanation) == 0:
            warnings.append(f"question {question.qid}: no gold explanation, excluded from MAP")
            continue
        hypothesis = build_hypothesis(question, question.answer_key)
        facts = []
        for uid, role in question.explanation.entries:
            fact = fact_kb.get(uid)
            if fact is None:
                warnings.append(f"question {question.qid}: gold uid {uid} not in fact KB, dropped")
                continue
            facts.append(
                GoldFact(
                    uid=uid,
                    role=role,
                    inference_type=fact.inference_type,
                    overlap=overlap_bucket(
                        pipeline.content_overlap_count(hypothesis.text, fact.text)
                    ),
                )
            )
        if not facts:
            warnings.append(f"question {question.qid}: no resolvable gold facts, excluded from MAP")
            continue
        gold_sets.append(QuestionGold(qid=question.qid, facts=tuple(facts)))
    return gold_sets, warnings


# ---------------------------------------------------------------------------
# Core metrics


def average_precision(ranked_uids, gold: set[str]) -> float:
    """AP = (1/|gold|) * sum over gold facts of precision at their rank.

    Gold facts missing from the ranking contribute 0 (worst-case rank).
    """
    if not gold:
        raise ValueError("average precision requires a non-empty gold set")
    hits = 0
    total = 0.0
    for rank, uid in enumerate(ranked_uids, start=1):
        if uid in gold:
            hits += 1
            total += hits / rank
            if hits == len(gold):
                break
    return total / len(gold)


def mean_average_precision(rankings: dict[str, list[str]], gold_sets: list[QuestionGold]) -> float:
    """Unweighted mean of per-question AP over annotated questions."""
    aps = [average_precision(rankings[g.qid], g.uids()) for g in gold_sets]
    if not aps:
        raise ValueError("no annotated questions to evaluate")
    return sum(aps) / len(aps)


def precision_at_k(ranked_uids, gold: set[str], k: int) -> float:
    """|top-k intersect gold| / k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    head = list(ranked_uids[:k])
    return sum(1 for uid in head if uid in gold) / k


def category_map(
    rankings: dict[str, list[str]],
    gold_sets: list[QuestionGold],
    kind: str,
    buckets,
) -> dict:
    """MAP per bucket: gold restricted to the bucket, ranking unchanged.

    Means are taken over questions having at least one gold fact in the
    bucket; buckets empty corpus-wide are omitted.
    """
    sums: dict = {b: 0.0 for b in buckets}
    counts: dict = {b: 0 for b in buckets}
    for gold in gold_sets:
        ranked = rankings[gold.qid]
        for bucket in buckets:
            uids = gold.bucket_uids(kind, bucket)
            if uids:
                sums[bucket] += average_precision(ranked, uids)
                counts[bucket] += 1
    return {b: sums[b] / counts[b] for b in buckets if counts[b] > 0}


def length_bucket_label(bin_: tuple[int, int | None]) -> str:
    lo, hi = bin_
    if hi is None:
        return f"{lo}+"
    if lo == hi:
        return str(lo)
    return f"{lo}-{hi}"


def map_by_explanation_length(
    rankings: dict[str, list[str]],
    gold_sets: list[QuestionGold],
    bins=DEFAULT_LENGTH_BINS,
) -> dict[str, float]:
    """MAP per gold-explanation-size bucket; empty buckets are omitted."""
    sums = {b: 0.0 for b in bins}
    counts = {b: 0 for b in bins}
    for gold in gold_sets:
        size = len(gold)
        for lo, hi in bins:
            if size >= lo and (hi is None or size <= hi):
                sums[(lo, hi)] += average_precision(rankings[gold.qid], gold.uids())
                counts[(lo, hi)] += 1
                break
    return {length_bucket_label(b): sums[b] / counts[b] for b in bins if counts[b] > 0}


# ---------------------------------------------------------------------------
# Report assembly


@dataclass
class EvalReport:
    """All reported metrics for one model run. Every value lies in [0, 1]."""

    model: str
    config: dict
    num_questions: int
    num_facts: int
    overall_map: float
    map_by_role: dict[str, float]
    map_by_overlap: dict[str, float]
    map_by_inference: dict[str, float]
    map_by_length: dict[str, float]
    precision_at_k: dict[int, float]
    per_question_ap: dict[str, float]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "config": self.config,
            "num_questions": self.num_questions,
            "num_facts": self.num_facts,
            "overall_map": self.overall_map,
            "map_by_role": self.map_by_role,
            "map_by_overlap": self.map_by_overlap,
            "map_by_inference": self.map_by_inference,
            "map_by_length": self.map_by_length,
            "precision_at_k": {str(k): v for k, v in self.precision_at_k.items()},
            "per_question_ap": self.per_question_ap,
            "warnings": self.warnings,
        }


def evaluate_rankings(
    rankings: dict[str, list[str]],
    gold_sets: list[QuestionGold],
    model: str = "",
    config: dict | None = None,
    num_facts: int = 0,
    ks=DEFAULT_PRECISION_KS,
    length_bins=DEFAULT_LENGTH_BINS,
    warnings: list[str] | None = None,
) -> EvalReport:
    """Aggregate every reported metric from per-question rankings."""
    gold_sets = [g for g in gold_sets if g.qid in rankings]
    per_question = {g.qid: average_precision(rankings[g.qid], g.uids()) for g in gold_sets}
    if not per_question:
        raise ValueError("no overlap between rankings and gold sets")
    warnings = list(warnings) if warnings else []
    for gold in gold_sets:
        missing = gold.uids() - set(rankings[gold.qid])
        if missing:
            warnings.append(
                f"question {gold.qid}: {len(missing)} gold fact(s) missing from the "
                "ranking (truncated?); they received worst-case ranks"
            )
    return EvalReport(
        model=model,
        config=config or {},
        num_questions=len(gold_sets),
        num_facts=num_facts,
        overall_map=sum(per_question.values()) / len(per_question),
        map_by_role={
            r.value: v
            for r, v in category_map(rankings, gold_sets, "role", ROLE_BUCKETS).items()
        },
        map_by_overlap=category_map(rankings, gold_sets, "overlap", ("0", "1", "1+")),
        map_by_inference={
            t.value: v
            for t, v in category_map(rankings, gold_sets, "inference", INFERENCE_BUCKETS).items()
        },
        map_by_length=map_by_explanation_length(rankings, gold_sets, length_bins),
        precision_at_k={
            k: sum(precision_at_k(rankings[g.qid], g.uids(), k) for g in gold_sets)
            / len(gold_sets)
            for k in ks
        },
        per_question_ap=per_question,
        warnings=warnings,
    )


def run_eval(
    ranker: UnificationRanker,
    questions: list[Question],
    gold_sets: list[QuestionGold],
    ks=DEFAULT_PRECISION_KS,
    length_bins=DEFAULT_LENGTH_BINS,
    rank_worker=None,
) -> EvalReport:
    """Rank every annotated question with the correct answer's hypothesis
    and aggregate the report. ``rank_worker`` may override how the ranked
    uid lists are produced (e.g. a process pool fan-out)."""
    annotated = {g.qid for g in gold_sets}
    queries = [q for q in questions if q.qid in annotated]
    if rank_worker is None:
        rankings = {
            q.qid: list(ranker.combined_ranking(build_hypothesis(q, q.answer_key)).uids)
            for q in queries
        }
    else:
        rankings = rank_worker(ranker, queries)
    return evaluate_rankings(
        rankings,
        gold_sets,
        model=ranker.config.model_name,
        config=ranker.config.describe(),
        num_facts=len(ranker.fact_kb),
        ks=ks,
        length_bins=length_bins,
    )


def knn_sweep(
    ranker: UnificationRanker,
    questions: list[Question],
    gold_sets: list[QuestionGold],
    k_values: list[int],
    rank_worker=None,
) -> dict[int, float]:
    """Overall MAP of the joint model for each neighbour count."""
    if any(k < 1 for k in k_values):
        raise ValueError("k values must be positive")
    result = {}
    for k in k_values:
        swept = ranker.with_config(k=k)
        result[k] = run_eval(swept, questions, gold_sets, rank_worker=rank_worker).overall_map
    return result


# ---------------------------------------------------------------------------
# Files: reports, figure CSVs, ranking/submission formats


def write_report(path: str | Path, reports: list[EvalReport], preprocessing: dict) -> None:
    payload = {
        "format": REPORT_FORMAT,
        "preprocessing": preprocessing,
        "models": [r.to_dict() for r in reports],
    }
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )


def write_length_csv(path: str | Path, reports: list[EvalReport], length_bins) -> None:
    labels = [length_bucket_label(b) for b in length_bins]
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# MAP by gold explanation size; buckets: {', '.join(labels)}\n")
        writer = csv.writer(f)
        writer.writerow(["length", "map", "model"])
        for report in reports:
            for label in labels:
                if label in report.map_by_length:
                    writer.writerow([label, repr(report.map_by_length[label]), report.model])


def write_precision_csv(path: str | Path, reports: list[EvalReport], ks) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# mean Precision@K; K values: {', '.join(str(k) for k in ks)}\n")
        writer = csv.writer(f)
        writer.writerow(["k", "precision", "model"])
        for report in reports:
            for k in ks:
                if k in report.precision_at_k:
                    writer.writerow([k, repr(report.precision_at_k[k]), report.model])


def write_sweep_csv(path: str | Path, sweep: dict[int, float], model: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# overall MAP vs neighbour count k; model: {model}\n")
        writer = csv.writer(f)
        writer.writerow(["k", "map"])
        for k in sorted(sweep):
            writer.writerow([k, repr(sweep[k])])


def write_rankings_tsv(path: str | Path, ranked_lists: list[RankedList], top_n: int | None) -> None:
    """Per-question records: qid, rank, fact uid, combined, rs, us."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("qid\trank\tfact_uid\tcombined\trs\tus\n")
        for ranked in ranked_lists:
            for rank, (uid, combined, rs, us) in enumerate(ranked.records(), start=1):
                if top_n is not None and rank > top_n:
                    break
                f.write(f"{ranked.query_qid}\t{rank}\t{uid}\t{combined!r}\t{rs!r}\t{us!r}\n")


def write_submission(path: str | Path, ranked_lists: list[RankedList], top_n: int | None) -> None:
    """Shared-task submission format: ``qid<TAB>fact_uid`` in rank order."""
    with open(path, "w", encoding="utf-8") as f:
        for ranked in ranked_lists:
            uids = ranked.uids if top_n is None else ranked.uids[:top_n]
            for uid in uids:
                f.write(f"{ranked.query_qid}\t{uid}\n")


def read_submission(path: str | Path) -> dict[str, list[str]]:
    rankings: dict[str, list[str]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'qid<TAB>fact_uid', got {line!r}")
        rankings.setdefault(parts[0], []).append(parts[1])
    return rankings


def score_submission(path: str | Path, gold_sets: list[QuestionGold]) -> EvalReport:
    """Score a submission file; reproduces the in-process MAP."""
    return evaluate_rankings(read_submission(path), gold_sets, model=str(path))
