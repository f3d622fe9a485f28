"""Corpus ingestion: fact tables, annotated questions, and the two KBs.

Parses tab-separated fact tables (one file per table, a header row whose
"[SKIP]"-marked columns are metadata, with exactly one header containing
"UID") and question files (stem with inline "(A) ..." choice markers, an
answer key, and optionally a space-separated "uid|role" explanation
column) into an immutable data model:

  FactKB          uid-indexed collection of atomic facts
  ExplanationKB   (hypothesis, explanation) pairs from annotated
                  training questions; the bank queried by the ranker

Malformed rows are never fatal: they are skipped and reported through
``IngestReport`` so partial corpora remain usable. The normalized model
round-trips through a JSON document per split, which is the contract
between ingestion and every downstream module.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path


class InferenceType(Enum):
    RETRIEVAL = "retrieval"
    INFERENCE_SUPPORTING = "inference_supporting"
    COMPLEX_INFERENCE = "complex_inference"
    UNKNOWN = "unknown"


class Role(Enum):
    CENTRAL = "central"
    GROUNDING = "grounding"
    LEXICAL_GLUE = "lexical_glue"
    OTHER = "other"


class Split(Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"


_ROLE_NAMES = {
    "CENTRAL": Role.CENTRAL,
    "GROUNDING": Role.GROUNDING,
    "LEXGLUE": Role.LEXICAL_GLUE,
}

CORPUS_FORMAT = "unirank-corpus/1"

_CHOICE_RE = re.compile(r"\(([A-H1-9])\)")


class CorpusError(Exception):
    """Fatal ingest problem (unreadable file, missing UID column, ...)."""


@dataclass
class IngestReport:
    """Non-fatal diagnostics accumulated while parsing corpus files."""

    warnings: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def extend(self, other: "IngestReport") -> None:
        self.warnings.extend(other.warnings)

    def __len__(self) -> int:
        return len(self.warnings)


@dataclass(frozen=True)
class Fact:
    uid: str
    text: str
    table: str
    inference_type: InferenceType = InferenceType.UNKNOWN


@dataclass(frozen=True)
class Choice:
    label: str
    text: str


@dataclass(frozen=True)
class Explanation:
    """(fact uid, explanatory role) entries; uids are unique within one explanation."""

    entries: tuple[tuple[str, Role], ...]

    def uids(self) -> set[str]:
        return {uid for uid, _ in self.entries}

    def role_of(self, uid: str) -> Role | None:
        for entry_uid, role in self.entries:
            if entry_uid == uid:
                return role
        return None

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Question:
    qid: str
    stem: str
    choices: tuple[Choice, ...]
    answer_key: str
    split: Split
    explanation: Explanation | None = None

    def choice(self, label: str) -> Choice:
        for c in self.choices:
            if c.label == label:
                return c
        raise KeyError(f"question {self.qid}: no choice with label {label!r}")


@dataclass(frozen=True)
class Hypothesis:
    """Question stem concatenated with one candidate answer."""

    source_qid: str
    text: str
    is_correct_candidate: bool


class FactKB:
    """uid-indexed, immutable collection of facts."""

    def __init__(self, facts: list[Fact]):
        self._facts: dict[str, Fact] = {}
        for fact in facts:
            if fact.uid in self._facts:
                raise CorpusError(f"duplicate fact uid {fact.uid!r}")
            self._facts[fact.uid] = fact

    def __len__(self) -> int:
        return len(self._facts)

    def __contains__(self, uid: str) -> bool:
        return uid in self._facts

    def __getitem__(self, uid: str) -> Fact:
        return self._facts[uid]

    def get(self, uid: str) -> Fact | None:
        return self._facts.get(uid)

    def facts(self) -> list[Fact]:
        return list(self._facts.values())

    def uids(self) -> list[str]:
        return list(self._facts.keys())


@dataclass(frozen=True)
class ExplanationKB:
    """Hypothesis/explanation pairs built from annotated train questions only."""

    pairs: tuple[tuple[Hypothesis, Explanation], ...]

    def __len__(self) -> int:
        return len(self.pairs)


# ---------------------------------------------------------------------------
# Fact tables


def load_inference_type_map(path: str | Path | None = None) -> dict:
    """Table-name -> inference-type rules (exact names plus prefixes)."""
    if path is None:
        text = (
            resources.files("unirank.data")
            .joinpath("table_inference_types.json")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    return {
        "tables": {k.upper(): InferenceType(v) for k, v in raw.get("tables", {}).items()},
        "prefixes": {k.upper(): InferenceType(v) for k, v in raw.get("prefixes", {}).items()},
    }


def infer_type_for_table(table_name: str, type_map: dict) -> InferenceType:
    name = table_name.upper()
    exact = type_map["tables"].get(name)
    if exact is not None:
        return exact
    for prefix, itype in sorted(type_map["prefixes"].items(), key=lambda kv: -len(kv[0])):
        if name.startswith(prefix):
            return itype
    return InferenceType.UNKNOWN


def parse_fact_table(
    path: str | Path,
    report: IngestReport,
    type_map: dict | None = None,
) -> list[Fact]:
    """Parse one tab-separated fact table file.

    The header row marks metadata columns with "[SKIP]"; exactly one of
    them must contain "UID". Fact text is the space-joined concatenation
    of non-skip cell values in column order, empty cells omitted.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise CorpusError(f"{path}: empty table file")
    header = lines[0].split("\t")
    uid_cols = [i for i, h in enumerate(header) if "[SKIP]" in h and "UID" in h.upper()]
    if len(uid_cols) != 1:
        raise CorpusError(
            f"{path}: expected exactly one '[SKIP] UID' column, found {len(uid_cols)}"
        )
    uid_col = uid_cols[0]
    text_cols = [i for i, h in enumerate(header) if "[SKIP]" not in h]

    table_name = path.stem
    itype = infer_type_for_table(table_name, type_map) if type_map else InferenceType.UNKNOWN
    facts = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if uid_col >= len(cells) or not cells[uid_col].strip():
            report.warn(f"{path.name}:{lineno}: row without uid skipped")
            continue
        uid = cells[uid_col].strip()
        words = [cells[i].strip() for i in text_cols if i < len(cells) and cells[i].strip()]
        if not words:
            report.warn(f"{path.name}:{lineno}: fact {uid} has empty text, rejected")
            continue
        facts.append(Fact(uid=uid, text=" ".join(words), table=table_name, inference_type=itype))
    return facts


def parse_fact_tables(
    directory: str | Path,
    report: IngestReport | None = None,
    type_map_path: str | Path | None = None,
) -> tuple[FactKB, IngestReport]:
    """Parse every ``*.tsv`` table in a directory into one FactKB."""
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"fact table directory not found: {directory}")
    report = report if report is not None else IngestReport()
    type_map = load_inference_type_map(type_map_path)

    facts: list[Fact] = []
    seen: dict[str, str] = {}
    collisions: list[str] = []
    for path in sorted(directory.glob("*.tsv")):
        for fact in parse_fact_table(path, report, type_map):
            if fact.uid in seen:
                collisions.append(f"{fact.uid} ({seen[fact.uid]} vs {fact.table})")
                continue
            seen[fact.uid] = fact.table
            facts.append(fact)
    if collisions:
        raise CorpusError("duplicate fact uids across tables: " + ", ".join(sorted(collisions)))
    if not facts:
        raise CorpusError(f"no facts parsed from {directory}")
    return FactKB(facts), report


# ---------------------------------------------------------------------------
# Questions


def _parse_explanation(cell: str, qid: str, report: IngestReport) -> Explanation | None:
    entries: list[tuple[str, Role]] = []
    seen: set[str] = set()
    for token in cell.split():
        if "|" not in token:
            report.warn(f"question {qid}: malformed explanation token {token!r} skipped")
            continue
        uid, _, role_name = token.partition("|")
        uid = uid.strip()
        if not uid:
            report.warn(f"question {qid}: malformed explanation token {token!r} skipped")
            continue
        if uid in seen:
            report.warn(f"question {qid}: duplicate explanation uid {uid} dropped")
            continue
        seen.add(uid)
        entries.append((uid, _ROLE_NAMES.get(role_name.strip().upper(), Role.OTHER)))
    if not entries:
        return None
    return Explanation(entries=tuple(entries))


def split_stem_and_choices(question_text: str) -> tuple[str, tuple[Choice, ...]]:
    """Split "stem (A) first (B) second ..." into the stem and its choices."""
    matches = list(_CHOICE_RE.finditer(question_text))
    if not matches:
        return question_text.strip(), ()
    stem = question_text[: matches[0].start()].strip()
    choices = []
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(question_text)
        choices.append(Choice(label=m.group(1), text=question_text[m.end() : end].strip()))
    return stem, tuple(choices)


def parse_questions(
    path: str | Path,
    split: Split,
    report: IngestReport | None = None,
) -> tuple[list[Question], IngestReport]:
    """Parse a tab-separated question file for one split.

    Columns are located by header name (case-insensitive): ``questionID``,
    ``question``, ``AnswerKey`` and, for annotated splits, ``explanation``.
    Questions missing their answer key or any parseable choice are rejected
    with a diagnostic.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"question file not found: {path}")
    report = report if report is not None else IngestReport()
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise CorpusError(f"{path}: empty question file")

    header = [h.strip().lower() for h in lines[0].split("\t")]

    def col(name: str) -> int | None:
        return header.index(name) if name in header else None

    qid_col = col("questionid")
    question_col = col("question")
    key_col = col("answerkey")
    expl_col = col("explanation")
    if qid_col is None or question_col is None or key_col is None:
        raise CorpusError(
            f"{path}: header must contain questionID, question and AnswerKey columns"
        )

    questions = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")

        def cell(i: int | None) -> str:
            return cells[i].strip() if i is not None and i < len(cells) else ""

        qid = cell(qid_col)
        if not qid:
            report.warn(f"{path.name}:{lineno}: row without question id skipped")
            continue
        stem, choices = split_stem_and_choices(cell(question_col))
        key = cell(key_col).upper()
        if not key:
            report.warn(f"question {qid}: missing answer key, rejected")
            continue
        if not any(c.label == key for c in choices):
            report.warn(f"question {qid}: answer key {key!r} has no matching choice, rejected")
            continue
        explanation = _parse_explanation(cell(expl_col), qid, report) if expl_col is not None else None
        questions.append(
            Question(
                qid=qid,
                stem=stem,
                choices=choices,
                answer_key=key,
                split=split,
                explanation=explanation,
            )
        )
    return questions, report


# ---------------------------------------------------------------------------
# Hypotheses and the explanation bank


def build_hypothesis(question: Question, choice_label: str) -> Hypothesis:
    """Concatenate the stem with one candidate answer (single-space separator)."""
    if not question.stem:
        raise ValueError(f"question {question.qid}: empty stem")
    choice = question.choice(choice_label)
    return Hypothesis(
        source_qid=question.qid,
        text=f"{question.stem} {choice.text}",
        is_correct_candidate=choice_label == question.answer_key,
    )


def build_explanation_kb(
    questions: list[Question],
    fact_kb: FactKB | None = None,
    report: IngestReport | None = None,
) -> tuple[ExplanationKB, IngestReport]:
    """One (hypothesis, explanation) pair per annotated train question.

    Hypotheses are built from the correct answer only. Explanation uids
    that do not resolve in the fact KB are reported but the pair is kept.
    """
    report = report if report is not None else IngestReport()
    pairs = []
    for question in questions:
        if question.split is not Split.TRAIN:
            raise ValueError(
                f"question {question.qid} has split {question.split.value}; "
                "the explanation bank is built from train questions only"
            )
        if question.explanation is None:
            report.warn(f"question {question.qid}: no explanation annotation, skipped")
            continue
        if fact_kb is not None:
            for uid in sorted(question.explanation.uids()):
                if uid not in fact_kb:
                    report.warn(f"question {question.qid}: explanation uid {uid} not in fact KB")
        pairs.append((build_hypothesis(question, question.answer_key), question.explanation))
    return ExplanationKB(pairs=tuple(pairs)), report


# ---------------------------------------------------------------------------
# Normalized JSON (the ingest <-> downstream contract)


def corpus_to_dict(fact_kb: FactKB, questions: list[Question], split: Split) -> dict:
    return {
        "format": CORPUS_FORMAT,
        "split": split.value,
        "facts": [
            {
                "uid": f.uid,
                "text": f.text,
                "table": f.table,
                "inference_type": f.inference_type.value,
            }
            for f in fact_kb.facts()
        ],
        "questions": [
            {
                "qid": q.qid,
                "stem": q.stem,
                "choices": [{"label": c.label, "text": c.text} for c in q.choices],
                "answer_key": q.answer_key,
                "explanation": (
                    [{"uid": uid, "role": role.value} for uid, role in q.explanation.entries]
                    if q.explanation is not None
                    else []
                ),
            }
            for q in questions
        ],
    }


def dump_corpus(path: str | Path, fact_kb: FactKB, questions: list[Question], split: Split) -> None:
    payload = corpus_to_dict(fact_kb, questions, split)
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=1) + "\n", encoding="utf-8"
    )


def load_corpus(path: str | Path) -> tuple[FactKB, list[Question], Split]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != CORPUS_FORMAT:
        raise CorpusError(f"{path}: unsupported corpus format {payload.get('format')!r}")
    split = Split(payload["split"])
    facts = [
        Fact(
            uid=f["uid"],
            text=f["text"],
            table=f["table"],
            inference_type=InferenceType(f["inference_type"]),
        )
        for f in payload["facts"]
    ]
    questions = [
        Question(
            qid=q["qid"],
            stem=q["stem"],
            choices=tuple(Choice(label=c["label"], text=c["text"]) for c in q["choices"]),
            answer_key=q["answer_key"],
            split=split,
            explanation=(
                Explanation(
                    entries=tuple((e["uid"], Role(e["role"])) for e in q["explanation"])
                )
                if q["explanation"]
                else None
            ),
        )
        for q in payload["questions"]
    ]
    return FactKB(facts), questions, split
