"""Multi-class discrete AdaBoost over random-hidden-layer weak learners.

Each round trains one network against the current sample distribution,
weighs it by alpha = 0.5*ln((1-err)/err) + 0.5*ln(K-1), and bumps the
weight of every misclassified row by exp(alpha) before renormalising.
The extra ln(K-1) term is the standard multi-class correction; it
vanishes for two classes, recovering the classic binary round weight.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .elm import DEFAULT_RCOND, ElmModel, predict_elm, train_elm
from .errors import BoostingFailure, DimensionMismatch

logger = logging.getLogger(__name__)

#: Error floor substituted when a round classifies every row correctly,
#: keeping its alpha large but finite.
PERFECT_ROUND_ERROR = 1e-10


@dataclass(frozen=True, eq=False)
class BoostedModel:
    """Ordered (alpha, weak learner) pairs from one boosting run."""

    rounds: tuple[tuple[float, ElmModel], ...]
    classes: np.ndarray
    T_requested: int

    def __post_init__(self):
        if not self.rounds:
            raise ValueError("a boosted model needs at least one round")
        if len(self.rounds) > self.T_requested:
            raise ValueError("more rounds than requested")
        object.__setattr__(self, "classes", np.asarray(self.classes, dtype=np.int64))

    @property
    def T_effective(self) -> int:
        return len(self.rounds)

    @property
    def alpha_total(self) -> float:
        return float(sum(alpha for alpha, _ in self.rounds))


def alpha_from_error(error, n_classes):
    """Round weight for a weighted error rate: 0.5*ln((1-e)/e) + 0.5*ln(K-1)."""
    return 0.5 * np.log((1.0 - error) / error) + 0.5 * np.log(n_classes - 1)


def update_weights(weights, alpha, misclassified):
    """Multiply misclassified weights by exp(alpha) and renormalise to sum 1."""
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    weights = np.asarray(weights, dtype=np.float64)
    misclassified = np.asarray(misclassified, dtype=bool)
    if misclassified.shape != weights.shape:
        raise ValueError("misclassified mask must match the weights")
    updated = weights * np.exp(alpha * misclassified)
    return updated / updated.sum()


def train_adaboost(data, T, L, activation="sigmoid", seed=0, *, classes=None,
                   rcond=DEFAULT_RCOND, weighted_weak_learner=True,
                   weighted_error=True, round_callback=None):
    """Boost a random-hidden-layer network for up to T rounds.

    The sample distribution starts uniform. Round t trains a weak learner
    with derived seed ``seed ^ t`` (so rounds differ even when the
    distribution barely moves), measures its distribution-weighted error,
    and stops early when a round is either perfect or no better than
    chance (error >= 1 - 1/K; such a round is discarded).

    Parameters
    ----------
    weighted_weak_learner : bool
        Pass the current distribution into the least-squares fit. With
        False every round fits unweighted and only the error/alpha see
        the distribution.
    weighted_error : bool
        Measure the error against the distribution (standard). With
        False the plain misclassification fraction is used.
    round_callback : callable, optional
        Called after each retained round as
        ``round_callback(t, error, alpha, distribution)`` with the
        post-update distribution; useful for diagnostics.
    """
    if T < 1:
        raise ValueError("round count T must be >= 1")
    if classes is None:
        classes = data.classes
    else:
        classes = np.asarray(classes, dtype=np.int64)
    n_classes = classes.size
    chance_error = 1.0 - 1.0 / n_classes

    n = data.n
    distribution = np.full(n, 1.0 / n)
    uniform = distribution
    rounds = []
    for t in range(1, T + 1):
        fit_weights = distribution if weighted_weak_learner else uniform
        weak = train_elm(data, fit_weights, L, activation, seed ^ t,
                         rcond=rcond, classes=classes)
        predicted, _ = predict_elm(weak, data.features)
        mistakes = predicted != data.labels
        if weighted_error:
            error = float(distribution[mistakes].sum())
        else:
            error = float(mistakes.mean())

        if error >= chance_error:
            logger.info("round %d discarded (error %.4f >= %.4f); boosting halts",
                        t, error, chance_error)
            break
        perfect = error <= 0.0
        alpha = float(alpha_from_error(max(error, PERFECT_ROUND_ERROR), n_classes))
        rounds.append((alpha, weak))
        distribution = update_weights(distribution, alpha, mistakes)
        if round_callback is not None:
            round_callback(t, error, alpha, distribution)
        if perfect:
            logger.info("round %d is perfect; boosting halts", t)
            break

    if not rounds:
        raise BoostingFailure(
            "the first weak learner was no better than chance; nothing to boost")
    return BoostedModel(tuple(rounds), classes, T)


def boosted_predict(model, X):
    """Alpha-weighted vote over the rounds.

    ``class_scores[i, c]`` sums alpha_t over the rounds whose weak
    learner assigns row i to class c; labels are the argmax with ties to
    the lowest class index.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-D matrix")
    scores = np.zeros((X.shape[0], model.classes.size))
    row_idx = np.arange(scores.shape[0])
    for alpha, weak in model.rounds:
        predicted, _ = predict_elm(weak, X)
        col_idx = np.searchsorted(model.classes, predicted)
        scores[row_idx, col_idx] += alpha
    labels = model.classes[np.argmax(scores, axis=1)]
    return labels, scores
