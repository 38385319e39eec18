import numpy as np

from factpipe.synth import synthetic_corpus, synthetic_corpus_rows, train_test_split_indices


def test_sizes_and_label_grouping():
    texts, labels = synthetic_corpus(4, 100, seed=0)
    assert len(texts) == 400
    assert labels.count(0) == labels.count(3) == 100


def test_vocabulary_is_class_specific_plus_noise():
    texts, labels = synthetic_corpus(3, 10, class_vocab_size=5, noise_vocab_size=7, seed=1)
    for text, label in zip(texts, labels):
        for token in text.split():
            assert token.startswith(f"c{label}word") or token.startswith("noise")


def test_document_length_band():
    texts, _ = synthetic_corpus(2, 50, mean_length=30, length_spread=10, seed=2)
    lengths = [len(t.split()) for t in texts]
    assert min(lengths) >= 20 and max(lengths) <= 40


def test_seeded_and_deterministic():
    a = synthetic_corpus(3, 20, seed=9)
    b = synthetic_corpus(3, 20, seed=9)
    c = synthetic_corpus(3, 20, seed=10)
    assert a == b
    assert a != c


def test_rows_carry_gold_labels():
    rows = synthetic_corpus_rows(("true", "false"), 5, seed=0)
    assert len(rows) == 10
    assert {row.verdict_class for row in rows} == {"true", "false"}
    assert all(row.domain_class is None for row in rows)
    ids = [row.record_id for row in rows]
    assert len(set(ids)) == len(ids)


def test_split_is_stratified_and_disjoint():
    _, labels = synthetic_corpus(4, 50, seed=3)
    train_idx, test_idx = train_test_split_indices(labels, 0.2, seed=3)
    assert set(train_idx) & set(test_idx) == set()
    assert len(train_idx) + len(test_idx) == len(labels)
    y = np.asarray(labels)
    for c in range(4):
        assert (y[test_idx] == c).sum() == 10
