"""Precision-recall analysis, AUC, confusion matrices, threshold picking.

PR curves have one point per distinct score threshold, descending, with
all tied scores entering at once.  A sample is predicted positive when
its score >= the threshold, so the first point already predicts at least
one positive and recall reaches 1 at the last point.  AUC is the
step-wise sum of precision * recall-increment (no interpolation).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dataset import LABELS, Corpus, Label
from .errors import NoPositivesError, RecallUnreachableError, ShapeMismatchError
from .nn.model import Model, forward
from .nn.train import corpus_tensors


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float
    recall: float


@dataclass(frozen=True)
class PRCurve:
    class_label: Optional[Label]
    points: tuple[PRPoint, ...]
    auc: float


def pr_curve(
    scores: Sequence[float],
    is_positive: Sequence[bool],
    class_label: Optional[Label] = None,
) -> PRCurve:
    s = np.asarray(scores, dtype=np.float64)
    pos = np.asarray(is_positive, dtype=bool)
    if s.ndim != 1 or s.shape != pos.shape or s.size == 0:
        raise ShapeMismatchError(
            f"scores and is_positive must be equal-length 1-D, got {s.shape} and {pos.shape}"
        )
    total_pos = int(pos.sum())
    if total_pos == 0:
        raise NoPositivesError("pr_curve needs at least one positive sample")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    pos_sorted = pos[order]
    cum_tp = np.cumsum(pos_sorted)
    # Last index of each run of equal scores = the whole tie group is in.
    boundary = np.nonzero(np.diff(s_sorted))[0]
    last = np.concatenate([boundary, [s.size - 1]])
    points = []
    auc = 0.0
    prev_recall = 0.0
    for i in last:
        predicted = int(i) + 1
        tp = int(cum_tp[i])
        precision = tp / predicted
        recall = tp / total_pos
        points.append(PRPoint(threshold=float(s_sorted[i]), precision=precision, recall=recall))
        auc += (recall - prev_recall) * precision
        prev_recall = recall
    return PRCurve(class_label=class_label, points=tuple(points), auc=auc)


def scores_for_corpus(model: Model, corpus: Corpus) -> tuple[np.ndarray, np.ndarray]:
    """(probs (N, n_classes), y (N,)) for every sample in the corpus."""
    x, y = corpus_tensors(corpus, model.config)
    probs = forward(model, x)
    return probs, y


def pr_curves_per_class(
    model: Model, test: Corpus
) -> tuple[dict[Label, PRCurve], list[Label]]:
    """One-vs-rest curve per class from softmax scores.  Classes with no
    positives in `test` are skipped and reported in the second value."""
    probs, y = scores_for_corpus(model, test)
    curves: dict[Label, PRCurve] = {}
    skipped: list[Label] = []
    for label in LABELS:
        positives = y == label.class_index
        if not positives.any():
            skipped.append(label)
            continue
        curves[label] = pr_curve(probs[:, label.class_index], positives, label)
    return curves, skipped


def confusion_from_probs(
    probs: np.ndarray, y: np.ndarray, threshold: float
) -> tuple[np.ndarray, int]:
    """5x5 counts (rows = true, cols = predicted) over samples whose top
    probability reaches the threshold; the rest abstain."""
    if not 0.0 <= threshold <= 1.0:
        raise ShapeMismatchError(f"threshold must be in [0, 1], got {threshold}")
    n_classes = probs.shape[1]
    top = probs.max(axis=1)
    keep = top >= threshold
    pred = probs.argmax(axis=1)
    matrix = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(matrix, (y[keep], pred[keep]), 1)
    return matrix, int((~keep).sum())


def confusion_matrix(
    model: Model, test: Corpus, threshold: float
) -> tuple[np.ndarray, int]:
    probs, y = scores_for_corpus(model, test)
    return confusion_from_probs(probs, y, threshold)


def precision_at_recall(curve: PRCurve, target_recall: float) -> float:
    """Precision of the first point (descending threshold) whose recall
    reaches the target."""
    if target_recall <= 0.0:
        raise RecallUnreachableError(f"target recall must be positive, got {target_recall}")
    for point in curve.points:
        if point.recall >= target_recall:
            return point.precision
    raise RecallUnreachableError(
        f"no threshold reaches recall {target_recall} "
        f"(max recall {curve.points[-1].recall if curve.points else 0.0})"
    )


def macro_accuracy(matrix: np.ndarray) -> float:
    """Mean per-class recall over classes that appear (rows with counts)."""
    row_totals = matrix.sum(axis=1)
    present = row_totals > 0
    if not present.any():
        return 0.0
    recalls = matrix.diagonal()[present] / row_totals[present]
    return float(recalls.mean())
