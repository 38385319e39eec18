"""Text cleaning, vocabulary construction and sparse TF-IDF vectorization.

The cleaning rule is deliberately minimal and deterministic: lowercase,
replace every non-alphanumeric character with a space, collapse runs.
No stop-word removal, no stemming.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from ._text import squash

DEFAULT_MIN_DF = 2
DEFAULT_MAX_TERMS = 50_000


class VocabularyFormatError(ValueError):
    """Raised when a vocabulary file does not round-trip."""


def clean_text(title: str, body: str) -> str:
    """Cleaned title+body: lowercase alphanumerics separated by single spaces."""
    return squash(title + " " + body)


def tokenize(clean: str) -> list[str]:
    """Split cleaned text on single spaces; joining the tokens restores it."""
    return clean.split(" ") if clean else []


@dataclass(frozen=True)
class Vocabulary:
    """Term index with document frequencies.

    ``terms`` is lexicographically ordered so column ids are stable; the
    index maps each term to its column.
    """

    terms: tuple[str, ...]
    doc_freq: dict[str, int]
    corpus_size: int
    min_df: int
    max_terms: int

    @cached_property
    def index(self) -> dict[str, int]:
        return {term: i for i, term in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def idf(self, term: str) -> float:
        """Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1."""
        return math.log((1 + self.corpus_size) / (1 + self.doc_freq[term])) + 1.0


def build_vocabulary(
    corpus: Iterable[Sequence[str]],
    min_df: int = DEFAULT_MIN_DF,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> Vocabulary:
    """Single pass over tokenized documents; deterministic term ordering.

    Terms with document frequency >= min_df are kept, truncated to the
    max_terms highest-df terms (ties broken lexicographically), then
    ordered lexicographically for column ids.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")

    df: dict[str, int] = {}
    corpus_size = 0
    for doc in corpus:
        corpus_size += 1
        for term in set(doc):
            df[term] = df.get(term, 0) + 1

    eligible = [term for term, count in df.items() if count >= min_df]
    eligible.sort(key=lambda term: (-df[term], term))
    kept = sorted(eligible[:max_terms])
    return Vocabulary(
        terms=tuple(kept),
        doc_freq={term: df[term] for term in kept},
        corpus_size=corpus_size,
        min_df=min_df,
        max_terms=max_terms,
    )


@dataclass(frozen=True)
class FeatureVector:
    """Sparse L2-normalized TF-IDF vector: column id -> weight."""

    entries: dict[int, float]
    dim: int

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        for col, weight in self.entries.items():
            dense[col] = weight
        return dense

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))


def vectorize_tfidf(doc: Sequence[str], vocab: Vocabulary) -> FeatureVector:
    """TF-IDF weights (raw tf, smoothed idf), L2-normalized unless all-zero.

    Out-of-vocabulary tokens are ignored.
    """
    counts: dict[int, int] = {}
    index = vocab.index
    for token in doc:
        col = index.get(token)
        if col is not None:
            counts[col] = counts.get(col, 0) + 1

    entries = {
        col: count * vocab.idf(vocab.terms[col]) for col, count in counts.items()
    }
    norm = math.sqrt(sum(w * w for w in entries.values()))
    if norm > 0:
        entries = {col: w / norm for col, w in entries.items()}
    return FeatureVector(entries=entries, dim=len(vocab))


def stack_features(vectors: Sequence[FeatureVector]) -> sparse.csr_matrix:
    """Assemble feature vectors into one CSR matrix, row per document."""
    if not vectors:
        raise ValueError("no vectors to stack")
    dim = vectors[0].dim
    rows, cols, data = [], [], []
    for i, vec in enumerate(vectors):
        if vec.dim != dim:
            raise ValueError(f"inconsistent dims: {vec.dim} != {dim}")
        for col in sorted(vec.entries):
            rows.append(i)
            cols.append(col)
            data.append(vec.entries[col])
    return sparse.csr_matrix(
        (data, (rows, cols)), shape=(len(vectors), dim), dtype=np.float64
    )


# --- vocabulary persistence -------------------------------------------------

_VOCAB_MAGIC = "factpipe-vocabulary"
_VOCAB_VERSION = 1


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Versioned text format: header lines, then one `term<TAB>df` per line."""
    lines = [
        f"{_VOCAB_MAGIC} {_VOCAB_VERSION}",
        f"corpus_size={vocab.corpus_size}",
        f"min_df={vocab.min_df}",
        f"max_terms={vocab.max_terms}",
    ]
    lines.extend(f"{term}\t{vocab.doc_freq[term]}" for term in vocab.terms)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_vocabulary(path: str | Path) -> Vocabulary:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if len(lines) < 4 or lines[0] != f"{_VOCAB_MAGIC} {_VOCAB_VERSION}":
        raise VocabularyFormatError(f"{path}: not a version-{_VOCAB_VERSION} vocabulary file")

    header = {}
    for line in lines[1:4]:
        key, _, value = line.partition("=")
        header[key] = value
    try:
        corpus_size = int(header["corpus_size"])
        min_df = int(header["min_df"])
        max_terms = int(header["max_terms"])
    except (KeyError, ValueError) as exc:
        raise VocabularyFormatError(f"{path}: bad header: {exc}") from exc

    terms: list[str] = []
    doc_freq: dict[str, int] = {}
    for line in lines[4:]:
        if not line:
            continue
        term, tab, df_text = line.partition("\t")
        if not tab:
            raise VocabularyFormatError(f"{path}: bad term line {line!r}")
        terms.append(term)
        doc_freq[term] = int(df_text)
    return Vocabulary(
        terms=tuple(terms),
        doc_freq=doc_freq,
        corpus_size=corpus_size,
        min_df=min_df,
        max_terms=max_terms,
    )
