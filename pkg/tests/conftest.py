from pathlib import Path

import pytest

from unirank.corpus import (
    Split,
    build_explanation_kb,
    parse_fact_tables,
    parse_questions,
)
from unirank.ranker import RankerConfig, UnificationRanker
from unirank.text import TextPipeline

MINI_CORPUS = Path(__file__).parent / "data" / "mini_corpus"


@pytest.fixture(scope="session")
def mini_corpus_dir() -> Path:
    return MINI_CORPUS


@pytest.fixture(scope="session")
def pipeline() -> TextPipeline:
    return TextPipeline.default()


@pytest.fixture(scope="session")
def fact_kb():
    kb, report = parse_fact_tables(MINI_CORPUS / "tables")
    assert not report.warnings
    return kb


@pytest.fixture(scope="session")
def train_questions():
    questions, report = parse_questions(MINI_CORPUS / "questions.train.tsv", Split.TRAIN)
    assert not report.warnings
    return questions


@pytest.fixture(scope="session")
def dev_questions():
    questions, report = parse_questions(MINI_CORPUS / "questions.dev.tsv", Split.DEV)
    assert not report.warnings
    return questions


@pytest.fixture(scope="session")
def explanation_kb(train_questions, fact_kb):
    ekb, report = build_explanation_kb(train_questions, fact_kb)
    assert not report.warnings
    return ekb


@pytest.fixture()
def make_ranker(fact_kb, explanation_kb, pipeline):
    def factory(config: RankerConfig | None = None, **kwargs) -> UnificationRanker:
        if config is None:
            config = RankerConfig(**kwargs)
        return UnificationRanker(fact_kb, explanation_kb, pipeline, config)

    return factory
