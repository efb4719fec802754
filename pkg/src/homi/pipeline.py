"""Cross-validated evaluation: fold split, per-fold standardize/fit/score, aggregation."""

import numpy as np

from .data import kfold_split, standardize
from .metrics import (
    METRIC_NAMES,
    EvalReport,
    MetricSummary,
    NoEvaluableInstance,
    NoEvaluableLabel,
    hamming_loss,
    macro_auc,
    one_error,
    ranking_loss,
)
from .model import decision_values, fit, predict


def evaluate_fold(model, X_test, Y_test):
    """The four measures on one test block; rank-based ones may be None
    when the block has no evaluable instance (label)."""
    scores = decision_values(model, X_test)
    preds = predict(model, X_test)
    record = {"hamming_loss": hamming_loss(preds, Y_test)}
    try:
        record["ranking_loss"] = ranking_loss(scores, Y_test)
    except NoEvaluableInstance:
        record["ranking_loss"] = None
    record["one_error"] = one_error(scores, Y_test)
    try:
        record["macro_auc"] = macro_auc(scores, Y_test)
    except NoEvaluableLabel:
        record["macro_auc"] = None
    return record


def cross_validate(dataset, hyper=None, options=None, k=5, seed=0):
    """k-fold cross-validation of the trainer on a dataset.

    Features are standardized per fold with training-fold statistics.
    Folds are deterministic for a fixed seed, so runs with different
    training variants are paired.  Folds where a rank-based metric is
    degenerate are excluded from that metric's aggregate; if every fold is
    degenerate the metric's error propagates.
    """
    plan = kfold_split(dataset.n, k, seed)
    fold_values = []
    for fold in range(k):
        test = plan.assignments == fold
        train = ~test
        X_train, X_test, _ = standardize(dataset.X[train], dataset.X[test])
        model = fit(X_train, dataset.Y[train], hyper, options)
        fold_values.append(evaluate_fold(model, X_test, dataset.Y[test]))

    summaries = {}
    for name in METRIC_NAMES:
        vals = [rec[name] for rec in fold_values if rec[name] is not None]
        if not vals:
            if name == "macro_auc":
                raise NoEvaluableLabel(f"every fold degenerate for {name}")
            raise NoEvaluableInstance(f"every fold degenerate for {name}")
        summaries[name] = MetricSummary(
            mean=float(np.mean(vals)), std=float(np.std(vals))
        )
    return EvalReport(fold_values=fold_values, **summaries)
