import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import recount_metrics

from factpipe.metrics import ConfusionMatrix, confusion, format_report, score


def _cm(counts, names=None):
    counts = np.asarray(counts)
    names = tuple(names or (f"c{i}" for i in range(counts.shape[0])))
    return ConfusionMatrix(counts=counts, class_names=names)


class TestConfusion:
    def test_direct_tally(self):
        cm = confusion([0, 0, 1, 1], [0, 0, 0, 1], k=2)
        assert cm.counts.tolist() == [[2, 0], [1, 1]]

    def test_empty_sequences(self):
        cm = confusion([], [], k=3)
        assert cm.counts.sum() == 0 and cm.counts.shape == (3, 3)

    def test_perfect_predictions_are_diagonal(self):
        golds = [0, 1, 2, 1, 0]
        cm = confusion(golds, golds, k=3)
        assert np.array_equal(cm.counts, np.diag([2, 2, 1]))

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="golds"):
            confusion([0, 1], [0], k=2)

    def test_out_of_range_label(self):
        with pytest.raises(ValueError, match="lie in"):
            confusion([0, 2], [0, 0], k=2)
        with pytest.raises(ValueError, match="lie in"):
            confusion([0, 0], [0, -1], k=2)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            _cm([[1, 0], [0, -1]])


class TestScoreFixtures:
    def test_two_class_fixture(self):
        report = score(_cm([[2, 0], [1, 1]]))
        c0, c1 = report.per_class
        assert c0.precision == pytest.approx(2 / 3, abs=1e-12)
        assert c0.recall == pytest.approx(1.0, abs=1e-12)
        assert c0.f1 == pytest.approx(0.8, abs=1e-12)
        assert c1.precision == pytest.approx(1.0, abs=1e-12)
        assert c1.recall == pytest.approx(0.5, abs=1e-12)
        assert c1.f1 == pytest.approx(2 / 3, abs=1e-12)
        assert report.macro_f1 == pytest.approx(11 / 15, abs=1e-12)
        assert report.accuracy == pytest.approx(3 / 4, abs=1e-12)

    def test_macro_vs_weighted_fixture(self):
        report = score(_cm([[2, 0], [2, 1]]))
        assert report.macro_f1 == pytest.approx(7 / 12, abs=1e-12)
        assert report.weighted_f1 == pytest.approx((2 * (2 / 3) + 3 * 0.5) / 5, abs=1e-12)

    def test_diagonal_is_perfect(self):
        report = score(_cm([[3, 0, 0], [0, 2, 0], [0, 0, 4]]))
        assert report.macro_f1 == 1.0
        assert report.weighted_f1 == 1.0
        assert report.accuracy == 1.0

    def test_zero_support_class_included_in_macro(self):
        # class 2 never appears in gold or predictions: F1 = 0 by convention
        report = score(_cm([[2, 0, 0], [0, 2, 0], [0, 0, 0]]))
        assert report.per_class[2].f1 == 0.0
        assert report.per_class[2].support == 0
        assert report.macro_f1 == pytest.approx(2 / 3, abs=1e-12)

    def test_zero_denominator_precision(self):
        # class 1 is never predicted: precision 0, recall 0, f1 0
        report = score(_cm([[2, 0], [3, 0]]))
        assert report.per_class[1].precision == 0.0
        assert report.per_class[1].recall == 0.0
        assert report.per_class[1].f1 == 0.0

    def test_all_zero_matrix_is_an_error(self):
        with pytest.raises(ValueError, match="nothing scored"):
            score(_cm([[0, 0], [0, 0]]))


class TestScoreProperties:
    @given(
        st.lists(st.integers(0, 3), min_size=1, max_size=60).flatmap(
            lambda golds: st.tuples(
                st.just(golds),
                st.lists(st.integers(0, 3), min_size=len(golds), max_size=len(golds)),
            )
        )
    )
    def test_agrees_with_brute_force_recount(self, pair):
        golds, preds = pair
        report = score(confusion(golds, preds, k=4))
        expected = recount_metrics(golds, preds, k=4)
        assert report.macro_f1 == pytest.approx(expected["macro_f1"], abs=1e-12)
        assert report.weighted_f1 == pytest.approx(expected["weighted_f1"], abs=1e-12)
        assert report.accuracy == pytest.approx(expected["accuracy"], abs=1e-12)
        for got, want in zip(report.per_class, expected["per_class"]):
            assert got.precision == pytest.approx(want["precision"], abs=1e-12)
            assert got.recall == pytest.approx(want["recall"], abs=1e-12)
            assert got.f1 == pytest.approx(want["f1"], abs=1e-12)
            assert got.support == want["support"]

    @given(st.permutations(range(3)), st.data())
    def test_class_permutation_invariance(self, perm, data):
        golds = data.draw(st.lists(st.integers(0, 2), min_size=2, max_size=40))
        preds = data.draw(
            st.lists(st.integers(0, 2), min_size=len(golds), max_size=len(golds))
        )
        base = score(confusion(golds, preds, k=3))
        permuted = score(
            confusion([perm[g] for g in golds], [perm[p] for p in preds], k=3)
        )
        assert permuted.macro_f1 == pytest.approx(base.macro_f1, abs=1e-12)
        assert permuted.weighted_f1 == pytest.approx(base.weighted_f1, abs=1e-12)
        assert permuted.accuracy == pytest.approx(base.accuracy, abs=1e-12)
        for i in range(3):
            assert permuted.per_class[perm[i]].f1 == pytest.approx(
                base.per_class[i].f1, abs=1e-12
            )

    def test_equal_supports_make_weighted_equal_macro(self):
        report = score(_cm([[3, 1, 1], [1, 3, 1], [1, 1, 3]]))
        assert report.weighted_f1 == pytest.approx(report.macro_f1, abs=1e-12)

    @given(
        st.lists(st.integers(0, 2), min_size=1, max_size=40).flatmap(
            lambda golds: st.tuples(
                st.just(golds),
                st.lists(st.integers(0, 2), min_size=len(golds), max_size=len(golds)),
            )
        )
    )
    def test_all_values_in_unit_interval_and_accuracy_exact(self, pair):
        golds, preds = pair
        cm = confusion(golds, preds, k=3)
        report = score(cm)
        values = [report.macro_f1, report.weighted_f1, report.accuracy]
        values += [v for s in report.per_class for v in (s.precision, s.recall, s.f1)]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert report.accuracy == np.trace(cm.counts) / cm.total

    def test_sklearn_cross_check(self):
        # third route, in addition to the hand recount oracle
        from sklearn.metrics import f1_score

        rng = np.random.default_rng(0)
        golds = rng.integers(0, 4, size=200)
        preds = rng.integers(0, 4, size=200)
        report = score(confusion(golds, preds, k=4))
        assert report.macro_f1 == pytest.approx(
            f1_score(golds, preds, average="macro", labels=range(4)), abs=1e-12
        )
        assert report.weighted_f1 == pytest.approx(
            f1_score(golds, preds, average="weighted", labels=range(4)), abs=1e-12
        )


class TestRendering:
    def test_as_dict_is_json_ready(self):
        import json

        cm = confusion([0, 1, 1], [0, 1, 0], k=2, class_names=("neg", "pos"))
        payload = {"confusion": cm.as_dict(), **score(cm).as_dict()}
        parsed = json.loads(json.dumps(payload))
        assert parsed["confusion"]["class_names"] == ["neg", "pos"]
        assert "macro_f1" in parsed

    def test_format_report_mentions_everything(self):
        cm = confusion([0, 1, 1], [0, 1, 0], k=2, class_names=("neg", "pos"))
        text = format_report(cm, score(cm))
        for needle in ("neg", "pos", "macro F1", "weighted F1", "accuracy"):
            assert needle in text
