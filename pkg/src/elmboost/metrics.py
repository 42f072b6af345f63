"""Confusion-matrix metrics: accuracy, macro precision/recall, and their F1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """Scalar metrics plus the per-class vectors and the confusion matrix."""

    accuracy: float
    macro_precision: float
    macro_recall: float
    f1: float
    per_class_precision: np.ndarray
    per_class_recall: np.ndarray
    confusion: np.ndarray


def confusion(true_labels, predicted, n_classes):
    """K x K count matrix: rows are true classes, columns predicted ones."""
    true_labels = np.asarray(true_labels)
    predicted = np.asarray(predicted)
    if true_labels.shape != predicted.shape or true_labels.ndim != 1:
        raise ValueError("true and predicted labels must be 1-D and equal length")
    if n_classes < 1:
        raise ValueError("n_classes must be >= 1")
    for name, labels in (("true", true_labels), ("predicted", predicted)):
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise ValueError(f"{name} labels fall outside 0..{n_classes - 1}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (true_labels, predicted), 1)
    return counts


def macro_metrics(cm):
    """Metrics from a confusion matrix.

    Per-class precision is the diagonal over the column sum, recall the
    diagonal over the row sum; classes with a zero denominator contribute
    0 but still count toward the K-way average. F1 is the harmonic mean
    of the two macro averages.
    """
    cm = np.asarray(cm)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1]:
        raise ValueError("confusion matrix must be square")
    total = int(cm.sum())
    if total < 1:
        raise ValueError("confusion matrix is empty")
    diag = np.diag(cm).astype(np.float64)
    col_sums = cm.sum(axis=0).astype(np.float64)
    row_sums = cm.sum(axis=1).astype(np.float64)
    precision = np.divide(diag, col_sums, out=np.zeros_like(diag), where=col_sums > 0)
    recall = np.divide(diag, row_sums, out=np.zeros_like(diag), where=row_sums > 0)
    macro_p = float(precision.mean())
    macro_r = float(recall.mean())
    f1 = 0.0 if macro_p + macro_r == 0 else 2.0 * macro_p * macro_r / (macro_p + macro_r)
    accuracy = float(diag.sum() / total)
    return MetricsReport(accuracy, macro_p, macro_r, f1, precision, recall, cm)
