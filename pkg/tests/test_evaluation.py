"""Precision-recall curves, confusion matrices, and derived metrics.

pr_curve is checked against a brute-force oracle: enumerate every
distinct score as a threshold, count TP/FP by hand, and compare point by
point. Randomized instances include heavy score ties.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvscan.dataset import LABELS, Label, generate_synthetic_corpus
from cvscan.errors import (
    NoPositivesError,
    RecallUnreachableError,
    ShapeMismatchError,
)
from cvscan.evaluation import (
    PRCurve,
    PRPoint,
    confusion_from_probs,
    confusion_matrix,
    macro_accuracy,
    pr_curve,
    pr_curves_per_class,
    precision_at_recall,
)
from cvscan.nn.model import init_model
from cvscan.nn.train import TrainConfig, train

RNG = np.random.default_rng(777)


def oracle_pr(scores, is_positive):
    """Straight-line reimplementation: one point per distinct threshold,
    descending; predicted positive means score >= threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    pos = np.asarray(is_positive, dtype=bool)
    p_total = int(pos.sum())
    points = []
    for t in sorted(set(scores.tolist()), reverse=True):
        predicted = scores >= t
        tp = int((predicted & pos).sum())
        points.append(
            PRPoint(
                threshold=float(t),
                precision=tp / int(predicted.sum()),
                recall=tp / p_total,
            )
        )
    auc = 0.0
    prev_recall = 0.0
    for pt in points:
        auc += (pt.recall - prev_recall) * pt.precision
        prev_recall = pt.recall
    return points, auc


class TestPrCurveWorkedExample:
    def test_three_sample_example(self):
        curve = pr_curve([0.9, 0.8, 0.3], [True, True, False])
        assert [
            (p.threshold, p.precision, p.recall) for p in curve.points
        ] == [
            (0.9, 1.0, 0.5),
            (0.8, 1.0, 1.0),
            (0.3, pytest.approx(2 / 3), 1.0),
        ]
        assert curve.auc == pytest.approx(1.0)

    def test_perfect_separation(self):
        curve = pr_curve([0.9, 0.8, 0.2, 0.1], [True, True, False, False])
        assert curve.auc == pytest.approx(1.0)

    def test_inverted_scores(self):
        curve = pr_curve([0.1, 0.2, 0.9], [True, True, False])
        assert curve.auc < 1.0

    def test_all_tied_scores_single_point(self):
        curve = pr_curve([0.5, 0.5, 0.5, 0.5], [True, False, True, False])
        assert len(curve.points) == 1
        point = curve.points[0]
        assert point.precision == pytest.approx(0.5)  # base rate
        assert point.recall == 1.0
        assert curve.auc == pytest.approx(0.5)

    def test_no_positives_raises(self):
        with pytest.raises(NoPositivesError):
            pr_curve([0.5, 0.2], [False, False])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            pr_curve([0.5, 0.2], [True])
        with pytest.raises(ShapeMismatchError):
            pr_curve([], [])

    def test_recall_is_monotone_nondecreasing(self):
        curve = pr_curve(
            [0.9, 0.7, 0.7, 0.4, 0.2], [False, True, False, True, True]
        )
        recalls = [p.recall for p in curve.points]
        assert recalls == sorted(recalls)
        assert recalls[-1] == 1.0

    def test_class_label_carried(self):
        curve = pr_curve([0.9], [True], class_label=Label.MEMORY)
        assert curve.class_label == Label.MEMORY


class TestPrCurveOracle:
    def test_randomized_instances(self):
        # 200 randomized instances, sizes up to 1000, with deliberately
        # coarse score grids so ties are common.
        for trial in range(200):
            n = int(RNG.integers(2, 1001))
            grid = int(RNG.integers(2, 20))
            scores = RNG.integers(0, grid, size=n).astype(np.float64) / grid
            pos = RNG.random(n) < float(RNG.uniform(0.1, 0.9))
            if not pos.any():
                pos[int(RNG.integers(0, n))] = True
            curve = pr_curve(scores, pos)
            want_points, want_auc = oracle_pr(scores, pos)
            assert len(curve.points) == len(want_points), f"trial {trial}"
            for got, want in zip(curve.points, want_points):
                assert got.threshold == pytest.approx(want.threshold)
                assert got.precision == pytest.approx(want.precision)
                assert got.recall == pytest.approx(want.recall)
            assert curve.auc == pytest.approx(want_auc), f"trial {trial}"

    @given(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=5),
                st.booleans(),
            ),
            min_size=1,
            max_size=60,
        ).filter(lambda rows: any(p for _, p in rows))
    )
    @settings(max_examples=80)
    def test_property_matches_oracle(self, rows):
        scores = [s / 5 for s, _ in rows]
        pos = [p for _, p in rows]
        curve = pr_curve(scores, pos)
        want_points, want_auc = oracle_pr(scores, pos)
        assert [
            (p.threshold, p.precision, p.recall) for p in curve.points
        ] == pytest.approx(
            [(p.threshold, p.precision, p.recall) for p in want_points]
        )
        assert curve.auc == pytest.approx(want_auc)

    def test_monotone_transform_invariance(self):
        scores = RNG.random(300)
        pos = RNG.random(300) < 0.4
        pos[0] = True
        base = pr_curve(scores, pos)
        squashed = pr_curve(1 / (1 + np.exp(-4 * scores)), pos)
        assert base.auc == pytest.approx(squashed.auc)
        assert [p.precision for p in base.points] == pytest.approx(
            [p.precision for p in squashed.points]
        )
        assert [p.recall for p in base.points] == pytest.approx(
            [p.recall for p in squashed.points]
        )


class TestPrecisionAtRecall:
    def _curve(self):
        return pr_curve(
            [0.9, 0.8, 0.6, 0.4], [True, False, True, False]
        )

    def test_first_reaching_point_wins(self):
        curve = self._curve()
        # Points: t=.9 (P=1, R=.5), t=.8 (P=.5, R=.5), t=.6 (P=2/3, R=1),
        # t=.4 (P=.5, R=1).
        assert precision_at_recall(curve, 0.5) == pytest.approx(1.0)
        assert precision_at_recall(curve, 0.9) == pytest.approx(2 / 3)
        assert precision_at_recall(curve, 1.0) == pytest.approx(2 / 3)

    def test_unreachable_target(self):
        truncated = PRCurve(
            class_label=None,
            points=(PRPoint(threshold=0.9, precision=1.0, recall=0.5),),
            auc=0.5,
        )
        with pytest.raises(RecallUnreachableError):
            precision_at_recall(truncated, 0.8)

    def test_nonpositive_target_rejected(self):
        with pytest.raises(RecallUnreachableError):
            precision_at_recall(self._curve(), 0.0)


def _probs(rows):
    arr = np.asarray(rows, dtype=np.float64)
    return arr / arr.sum(axis=1, keepdims=True)


class TestConfusion:
    def test_threshold_zero_counts_everything(self):
        probs = _probs([[5, 1, 1, 1, 1], [1, 5, 1, 1, 1], [1, 1, 1, 1, 5]])
        y = np.array([0, 1, 2])
        matrix, abstained = confusion_from_probs(probs, y, 0.0)
        assert abstained == 0
        assert matrix[0, 0] == 1 and matrix[1, 1] == 1
        assert matrix[2, 4] == 1  # true MEMORY predicted CLEAN
        assert matrix.sum() == 3

    def test_threshold_one_keeps_only_certain(self):
        probs = np.zeros((2, 5))
        probs[0, 3] = 1.0
        probs[1] = 0.2
        y = np.array([3, 0])
        matrix, abstained = confusion_from_probs(probs, y, 1.0)
        assert abstained == 1
        assert matrix.sum() == 1
        assert matrix[3, 3] == 1

    def test_abstention_monotone_in_threshold(self):
        probs = _probs(RNG.random((50, 5)) + 0.01)
        y = RNG.integers(0, 5, size=50)
        counts = [
            confusion_from_probs(probs, y, t)[1]
            for t in (0.0, 0.3, 0.5, 0.7, 0.9)
        ]
        assert counts == sorted(counts)

    def test_bad_threshold_rejected(self):
        with pytest.raises(ShapeMismatchError):
            confusion_from_probs(_probs([[1, 1, 1, 1, 1]]), np.array([0]), 1.5)

    def test_macro_accuracy_uniform_diagonal(self):
        matrix = np.zeros((5, 5), dtype=np.int64)
        for i in range(5):
            matrix[i, i] = 10
        assert macro_accuracy(matrix) == 1.0

    def test_macro_accuracy_averages_per_class_recall(self):
        matrix = np.zeros((5, 5), dtype=np.int64)
        matrix[0, 0] = 9
        matrix[0, 1] = 1  # class 0 recall 0.9
        matrix[1, 1] = 1  # class 1 recall 1.0
        assert macro_accuracy(matrix) == pytest.approx((0.9 + 1.0) / 2)

    def test_macro_accuracy_ignores_absent_classes(self):
        matrix = np.zeros((5, 5), dtype=np.int64)
        matrix[2, 2] = 4
        assert macro_accuracy(matrix) == 1.0


@pytest.fixture(scope="module")
def quick_model_and_corpus(table):
    corpus = generate_synthetic_corpus(8, seed=17, table=table)
    model = init_model(seed=11, table_fingerprint=corpus.table_fingerprint)
    trained, _ = train(model, corpus, TrainConfig(epochs=3, seed=2))
    return trained, corpus


class TestPerClassCurves:
    def test_all_classes_present(self, quick_model_and_corpus):
        model, corpus = quick_model_and_corpus
        curves, skipped = pr_curves_per_class(model, corpus)
        assert skipped == []
        assert set(curves) == set(LABELS)
        for label, curve in curves.items():
            assert curve.class_label == label
            assert 0.0 <= curve.auc <= 1.0

    def test_missing_class_skipped(self, quick_model_and_corpus, table):
        import dataclasses

        model, corpus = quick_model_and_corpus
        no_clean = dataclasses.replace(
            corpus,
            samples=tuple(
                s for s in corpus.samples if s.label != Label.CLEAN
            ),
        )
        curves, skipped = pr_curves_per_class(model, no_clean)
        assert skipped == [Label.CLEAN]
        assert Label.CLEAN not in curves

    def test_confusion_matrix_counts_corpus(self, quick_model_and_corpus):
        model, corpus = quick_model_and_corpus
        matrix, abstained = confusion_matrix(model, corpus, 0.0)
        assert matrix.sum() + 0 == len(corpus.samples)
        assert abstained == 0
