"""Multi-label evaluation measures: hamming loss, ranking loss, one-error, macro AUC.

Conventions: ranking loss counts a (positive, negative) label pair as an error
when score(positive) <= score(negative), i.e. ties count against the ranker.
Macro AUC counts a (positive, negative) instance pair as a success when
score(positive) >= score(negative), i.e. ties count in favor.  Instances
(labels) without both a positive and a negative are excluded from the
ranking-loss (macro-AUC) mean rather than scored 0 or 0.5.
"""

from dataclasses import dataclass, field

import numpy as np


class ShapeMismatch(Exception):
    """Prediction and truth arrays have different shapes."""


class NoEvaluableInstance(Exception):
    """Every instance lacks either a positive or a negative label."""


class NoEvaluableLabel(Exception):
    """Every label lacks either a positive or a negative instance."""


def _check_pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2:
        raise ShapeMismatch(f"got shapes {a.shape} and {b.shape}")
    return a, b


def hamming_loss(pred, truth):
    """Fraction of individual label slots that disagree."""
    pred, truth = _check_pair(pred, truth)
    return float(np.mean(pred != truth))


def ranking_loss(scores, truth):
    """Per-instance fraction of wrongly ordered (positive, negative) label pairs.

    For each instance with at least one positive and one negative label,
    counts pairs where the positive label's score is <= the negative's, over
    |positives| * |negatives|.  Returns the mean over evaluable instances.
    """
    scores, truth = _check_pair(scores, truth)
    vals = []
    for i in range(scores.shape[0]):
        pos = scores[i, truth[i] == 1]
        neg = scores[i, truth[i] == 0]
        if pos.size == 0 or neg.size == 0:
            continue
        vals.append(float((pos[:, None] <= neg[None, :]).mean()))
    if not vals:
        raise NoEvaluableInstance("no instance has both positive and negative labels")
    return float(np.mean(vals))


def one_error(scores, truth):
    """Fraction of instances whose top-scored label is irrelevant.

    Argmax ties are broken toward the smallest label index.
    """
    scores, truth = _check_pair(scores, truth)
    if scores.shape[1] < 1:
        raise ShapeMismatch("need at least one label column")
    top = np.argmax(scores, axis=1)
    hits = truth[np.arange(scores.shape[0]), top]
    return float(np.mean(hits == 0))


def macro_auc(scores, truth):
    """Per-label probability that a positive instance outscores a negative one.

    For each label with at least one positive and one negative instance,
    counts pairs where score(positive) >= score(negative), over
    |positives| * |negatives|; returns the mean over evaluable labels.
    """
    scores, truth = _check_pair(scores, truth)
    vals = []
    for j in range(scores.shape[1]):
        pos = scores[truth[:, j] == 1, j]
        neg = scores[truth[:, j] == 0, j]
        if pos.size == 0 or neg.size == 0:
            continue
        vals.append(float((pos[:, None] >= neg[None, :]).mean()))
    if not vals:
        raise NoEvaluableLabel("no label has both positive and negative instances")
    return float(np.mean(vals))


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float


@dataclass(frozen=True)
class EvalReport:
    """Mean and standard deviation of the four measures across folds.

    fold_values holds one record per fold mapping metric name to its value,
    or to None when the fold was degenerate for that metric.
    """

    hamming_loss: MetricSummary
    ranking_loss: MetricSummary
    one_error: MetricSummary
    macro_auc: MetricSummary
    fold_values: list = field(default_factory=list)

    def summary(self, name):
        return getattr(self, name)


METRIC_NAMES = ("hamming_loss", "ranking_loss", "one_error", "macro_auc")
