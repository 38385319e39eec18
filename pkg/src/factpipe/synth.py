"""Seeded synthetic corpora for experiments and end-to-end tests.

Each class owns a private vocabulary; all classes share a pool of noise
terms. Every token of a document is drawn from the class vocabulary
with probability ``class_token_rate``, otherwise from the noise pool,
so classes are separable but not trivially so.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .corpusio import CorpusRow
from .ingest.urls import record_id_for


def synthetic_corpus(
    n_classes: int,
    docs_per_class: int,
    class_vocab_size: int = 20,
    noise_vocab_size: int = 50,
    mean_length: int = 30,
    length_spread: int = 10,
    class_token_rate: float = 0.5,
    seed: int = 0,
) -> tuple[list[str], list[int]]:
    """Generate documents and integer labels, grouped by class."""
    rng = np.random.default_rng(seed)
    class_vocabs = [
        [f"c{c}word{i:02d}" for i in range(class_vocab_size)]
        for c in range(n_classes)
    ]
    noise_vocab = [f"noise{i:02d}" for i in range(noise_vocab_size)]

    texts: list[str] = []
    labels: list[int] = []
    for c in range(n_classes):
        for _ in range(docs_per_class):
            length = int(
                rng.integers(mean_length - length_spread, mean_length + length_spread + 1)
            )
            tokens = []
            for _ in range(length):
                if rng.random() < class_token_rate:
                    tokens.append(class_vocabs[c][rng.integers(class_vocab_size)])
                else:
                    tokens.append(noise_vocab[rng.integers(noise_vocab_size)])
            texts.append(" ".join(tokens))
            labels.append(c)
    return texts, labels


def synthetic_corpus_rows(
    class_names: Sequence[str],
    docs_per_class: int,
    label_field: str = "verdict_class",
    seed: int = 0,
    **kwargs,
) -> list[CorpusRow]:
    """Synthetic documents wrapped as corpus rows with gold labels filled."""
    if label_field not in ("verdict_class", "domain_class"):
        raise ValueError(f"unknown label field {label_field!r}")
    texts, labels = synthetic_corpus(
        len(class_names), docs_per_class, seed=seed, **kwargs
    )
    rows = []
    for i, (text, label) in enumerate(zip(texts, labels)):
        url = f"http://synthetic.example/doc/{i:05d}"
        row = CorpusRow(
            record_id=record_id_for(url),
            canonical_url=url,
            site_id="synthetic",
            title=f"document {i:05d}",
            published_at=None,
            body_text=text,
            raw_verdict=None,
            raw_topic=None,
        )
        setattr(row, label_field, class_names[label])
        rows.append(row)
    return rows


def train_test_split_indices(
    labels: Sequence[int], test_fraction: float, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Stratified train/test index split (per-class shuffle, floor split)."""
    y = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        perm = idx[rng.permutation(len(idx))]
        n_test = int(len(idx) * test_fraction)
        test_parts.append(perm[:n_test])
        train_parts.append(perm[n_test:])
    return np.concatenate(train_parts), np.concatenate(test_parts)
