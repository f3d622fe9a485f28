"""Deterministic text normalization shared by every vectorizer.

All ranking components see text through the same two-stage pipeline:
``tokenize`` (lowercase, split on non-alphanumeric boundaries) followed by
``normalize`` (optional lemma mapping, then stopword removal). The module
also provides the content-word overlap counter used to bucket gold facts
by how many terms they share with the query hypothesis.

A "content word" is approximated as "non-stopword": no POS tagging is
performed, so the shipped stopword list has to cover determiners,
prepositions, pronouns, auxiliaries and conjunctions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

_TOKEN_RE = re.compile(r"[a-z0-9]+")

DEFAULT_STOPWORDS_RESOURCE = "stopwords.txt"


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries. Digits are kept."""
    return _TOKEN_RE.findall(text.lower())


def normalize(
    tokens: list[str],
    stopwords: frozenset[str] = frozenset(),
    lemma_map: dict[str, str] | None = None,
) -> list[str]:
    """Apply the lemma map (when given) and drop stopwords, preserving order.

    Lemmas are applied before the stopword filter so that the operation is
    idempotent even when a lemma target happens to be a stopword.
    """
    if lemma_map:
        tokens = [lemma_map.get(t, t) for t in tokens]
    if stopwords:
        tokens = [t for t in tokens if t not in stopwords]
    return tokens


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stopword file (one term per line, '#' comments, UTF-8).

    With no path, the list bundled with the package is used.
    """
    if path is None:
        text = (
            resources.files("unirank.data")
            .joinpath(DEFAULT_STOPWORDS_RESOURCE)
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    terms = set()
    for line in text.splitlines():
        term = line.split("#", 1)[0].strip().lower()
        if term:
            terms.add(term)
    return frozenset(terms)


def load_lemma_map(path: str | Path) -> dict[str, str]:
    """Read a ``surface<TAB>lemma`` file into a fixed-point mapping.

    Chains (a -> b, b -> c) are resolved at load so every entry maps to a
    fixed point and applying the map twice equals applying it once. A cycle
    is broken at its lexicographically smallest member.
    """
    raw: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].rstrip("\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"malformed lemma entry (expected 2 tab-separated fields): {line!r}")
        surface, lemma = parts[0].strip().lower(), parts[1].strip().lower()
        if surface and lemma:
            raw[surface] = lemma

    resolved: dict[str, str] = {}
    for surface in raw:
        seen = [surface]
        current = surface
        while current in raw and raw[current] != current:
            current = raw[current]
            if current in seen:  # cycle
                current = min(seen)
                break
            seen.append(current)
        resolved[surface] = current
    return resolved


@dataclass(frozen=True)
class TextPipeline:
    """Tokenization + normalization settings applied uniformly to all text.

    ``tokens(text)`` is the single entry point used by vectorizers;
    ``content_overlap_count`` compares two raw texts on the same footing.
    """

    stopwords: frozenset[str] = field(default_factory=frozenset)
    lemma_map: dict[str, str] | None = None

    @classmethod
    def default(cls) -> "TextPipeline":
        return cls(stopwords=load_stopwords())

    def tokens(self, text: str) -> list[str]:
        return normalize(tokenize(text), self.stopwords, self.lemma_map)

    def content_terms(self, text: str) -> set[str]:
        return set(self.tokens(text))

    def content_overlap_count(self, text_a: str, text_b: str) -> int:
        """Number of distinct normalized content terms shared by both texts."""
        return len(self.content_terms(text_a) & self.content_terms(text_b))

    def describe(self) -> dict:
        """Settings snapshot for run manifests."""
        return {
            "stopword_count": len(self.stopwords),
            "lemma_entries": len(self.lemma_map) if self.lemma_map else 0,
        }


def overlap_bucket(count: int) -> str:
    """Map a shared-term count to its evaluation bucket: '0', '1' or '1+'.

    The buckets partition the gold facts: '1+' holds facts sharing more
    than one content term with the hypothesis.
    """
    if count == 0:
        return "0"
    if count == 1:
        return "1"
    return "1+"
