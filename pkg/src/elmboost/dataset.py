"""Row-major labelled datasets: the unit of ingestion, partitioning and evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True, eq=False)
class Dataset:
    """A feature matrix with one integer class label per row.

    Parameters
    ----------
    features : ndarray of shape (n, p)
        Row-major feature matrix, stored as float64.
    labels : ndarray of shape (n,)
        Integer class labels aligned with the feature rows.
    label_values : ndarray of shape (K,), optional
        When labels were canonicalised to 0..K-1 on load, the original
        value each canonical label stands for; None for native labels.
    """

    features: np.ndarray
    labels: np.ndarray
    label_values: np.ndarray | None = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels)
        if features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        n, p = features.shape
        if n < 1 or p < 1:
            raise ValueError("dataset needs at least one row and one feature")
        if labels.shape != (n,):
            raise ValueError(f"labels shape {labels.shape} does not match {n} rows")
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValueError("labels must be integers")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels.astype(np.int64))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @cached_property
    def classes(self) -> np.ndarray:
        """Distinct labels, ascending."""
        return np.unique(self.labels)
