"""In-process map/shuffle/reduce training over random row partitions.

Map assigns every training row a uniform-random partition id in [0, M),
shuffle groups rows by id, and each reduce task boosts one model over its
partition. The per-partition seed is ``seed ^ partition_id``, so the
result is identical no matter how reduce tasks are scheduled, and the
members are always assembled in partition-id order.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boosting import BoostedModel, boosted_predict, train_adaboost
from .dataset import Dataset
from .elm import DEFAULT_RCOND
from .errors import DegenerateData, DimensionMismatch, NoTrainablePartition

logger = logging.getLogger(__name__)

#: Partitions with fewer rows than this are skipped rather than trained.
DEFAULT_MIN_PARTITION_ROWS = 5


@dataclass(frozen=True, eq=False)
class KeyedRow:
    """One training row tagged with its partition id."""

    key: int
    row: tuple  # (feature vector, label)


@dataclass(frozen=True, eq=False)
class PartitionedEnsemble:
    """Boosted models from every trainable partition plus the fusion rule.

    ``partition_sizes`` covers all M requested partitions (zeros for the
    empty ones) and always sums to the input row count.
    """

    members: tuple[BoostedModel, ...]
    member_partition_ids: tuple[int, ...]
    M_requested: int
    partition_sizes: np.ndarray
    classes: np.ndarray

    def __post_init__(self):
        if not self.members:
            raise ValueError("an ensemble needs at least one member")
        if len(self.members) != len(self.member_partition_ids):
            raise ValueError("one partition id per member required")
        if len(self.members) > self.M_requested:
            raise ValueError("more members than requested partitions")
        object.__setattr__(self, "partition_sizes",
                           np.asarray(self.partition_sizes, dtype=np.int64))
        object.__setattr__(self, "classes", np.asarray(self.classes, dtype=np.int64))


def map_assign(data, M, seed=0):
    """Tag each row with an independent uniform-random key in [0, M).

    Row content is preserved exactly and every input row appears exactly
    once, in input order.
    """
    if M < 1:
        raise ValueError("partition count M must be >= 1")
    keys = np.random.default_rng(seed).integers(0, M, size=data.n)
    return [KeyedRow(int(k), (data.features[i], int(data.labels[i])))
            for i, k in enumerate(keys)]


def shuffle_group(rows):
    """Group keyed rows into per-partition datasets, preserving row order.

    Keys with no rows are absent from the result.
    """
    grouped: dict[int, list] = {}
    for keyed in rows:
        grouped.setdefault(keyed.key, []).append(keyed.row)
    out = {}
    for key, members in grouped.items():
        X = np.stack([features for features, _ in members])
        y = np.array([label for _, label in members], dtype=np.int64)
        out[key] = Dataset(X, y)
    return out


def reduce_train(partition, T, L, activation="sigmoid", seed=0, *,
                 global_classes=None, min_partition_rows=DEFAULT_MIN_PARTITION_ROWS,
                 rcond=DEFAULT_RCOND, weighted_weak_learner=True,
                 weighted_error=True):
    """Boost one model over a partition, or return None to skip it.

    Training uses the global class list so score matrices stay aligned
    across partitions even when this partition misses some classes.
    Partitions that are too small or single-class are skipped (None).
    """
    if partition.n < min_partition_rows:
        logger.info("partition skipped: %d rows < min_partition_rows=%d",
                    partition.n, min_partition_rows)
        return None
    if partition.classes.size < 2:
        logger.info("partition skipped: single class %d", int(partition.classes[0]))
        return None
    try:
        return train_adaboost(partition, T, L, activation, seed,
                              classes=global_classes, rcond=rcond,
                              weighted_weak_learner=weighted_weak_learner,
                              weighted_error=weighted_error)
    except DegenerateData as exc:
        logger.info("partition skipped: %s", exc)
        return None


def train_ensemble(data, M, T, L, activation="sigmoid", seed=0, *,
                   workers=None, min_partition_rows=DEFAULT_MIN_PARTITION_ROWS,
                   rcond=DEFAULT_RCOND, weighted_weak_learner=True,
                   weighted_error=True):
    """Map, shuffle, and reduce-train over all partitions.

    Reduce tasks are independent and run on a bounded thread pool
    (``workers`` defaults to the machine's CPU count); each one derives
    its seed as ``seed ^ partition_id``, so serial and parallel runs
    produce bit-identical ensembles.

    Raises NoTrainablePartition when every partition was skipped.
    """
    if T < 1:
        raise ValueError("round count T must be >= 1")
    rows = map_assign(data, M, seed)
    groups = shuffle_group(rows)
    sizes = np.zeros(M, dtype=np.int64)
    for key, part in groups.items():
        sizes[key] = part.n

    tasks = sorted(groups.items())
    global_classes = data.classes

    def run_one(task):
        key, part = task
        return reduce_train(part, T, L, activation, seed ^ key,
                            global_classes=global_classes,
                            min_partition_rows=min_partition_rows,
                            rcond=rcond,
                            weighted_weak_learner=weighted_weak_learner,
                            weighted_error=weighted_error)

    if workers == 1:
        results = [run_one(task) for task in tasks]
    else:
        max_workers = workers if workers else os.cpu_count() or 1
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run_one, tasks))

    members, member_ids = [], []
    for (key, _), model in zip(tasks, results):
        if model is not None:
            members.append(model)
            member_ids.append(key)
    if not members:
        raise NoTrainablePartition(
            f"all {M} partitions were skipped (too small or single-class)")
    return PartitionedEnsemble(tuple(members), tuple(member_ids), M, sizes,
                               global_classes)


def ensemble_predict(ensemble, X):
    """Fuse the members into one prediction.

    Every member's boosted class scores are divided by that member's
    total alpha before summing, so no partition dominates purely through
    round-weight magnitude; labels are the argmax with ties to the lowest
    class index.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-D matrix")
    total = np.zeros((X.shape[0], ensemble.classes.size))
    for member in ensemble.members:
        _, scores = boosted_predict(member, X)
        total += scores / member.alpha_total
    labels = ensemble.classes[np.argmax(total, axis=1)]
    return labels, total
