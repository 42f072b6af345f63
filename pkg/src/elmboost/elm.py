"""Random-hidden-layer networks solved in closed form by least squares.

The classifier keeps a single hidden layer whose input weights and biases
are drawn once from a seeded generator and never trained. Hidden
activations H are computed for the training rows and the output weights
solve H @ beta = T through a singular-value pseudoinverse, where T is a
one-hot +-1 target matrix. Sample weights enter as row scaling of the
least-squares system, so uniform weights reduce exactly to the plain solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .dataset import Dataset
from .errors import DegenerateData, DimensionMismatch, NumericFailure

#: Relative singular-value cutoff used by the least-squares solve.
DEFAULT_RCOND = 1e-10

ACTIVATIONS = {
    "sigmoid": expit,
    "tanh": np.tanh,
}


@dataclass(frozen=True, eq=False)
class HiddenLayer:
    """Frozen random hidden layer.

    Row i of ``input_weights`` together with ``biases[i]`` feeds node i:
    its activation on x is ``g(input_weights[i] @ x + biases[i])``.
    """

    input_weights: np.ndarray  # (L, p)
    biases: np.ndarray  # (L,)
    activation: str

    def __post_init__(self):
        weights = np.asarray(self.input_weights, dtype=np.float64)
        biases = np.asarray(self.biases, dtype=np.float64)
        if weights.ndim != 2:
            raise ValueError("input_weights must be a 2-D array")
        if biases.shape != (weights.shape[0],):
            raise ValueError("biases length must equal the hidden-node count")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}; "
                             f"expected one of {sorted(ACTIVATIONS)}")
        object.__setattr__(self, "input_weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def n_nodes(self) -> int:
        return self.input_weights.shape[0]

    @property
    def n_features(self) -> int:
        return self.input_weights.shape[1]


@dataclass(frozen=True, eq=False)
class ElmModel:
    """A trained network: frozen hidden layer plus solved output weights.

    ``beta`` has one column per class; ``classes`` lists the labels those
    columns score, ascending.
    """

    hidden: HiddenLayer
    beta: np.ndarray  # (L, K)
    classes: np.ndarray  # (K,)

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        classes = np.asarray(self.classes)
        if beta.shape[0] != self.hidden.n_nodes:
            raise ValueError("beta row count must equal the hidden-node count")
        if classes.ndim != 1 or classes.size != beta.shape[1] or classes.size < 2:
            raise ValueError("classes must be a 1-D list matching beta columns, K >= 2")
        if np.any(np.diff(classes) <= 0):
            raise ValueError("classes must be ascending and duplicate-free")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "classes", classes.astype(np.int64))

    @property
    def n_features(self) -> int:
        return self.hidden.n_features


def init_hidden_layer(p, L, activation="sigmoid", seed=0):
    """Draw a fresh hidden layer: weights and biases i.i.d. uniform on [-1, 1].

    The same (p, L, activation, seed) always yields the identical layer.
    """
    if p < 1:
        raise ValueError("feature dimension p must be >= 1")
    if L < 1:
        raise ValueError("hidden-node count L must be >= 1")
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-1.0, 1.0, size=(L, p))
    biases = rng.uniform(-1.0, 1.0, size=L)
    return HiddenLayer(weights, biases, activation)


def hidden_matrix(layer, X):
    """Hidden activations for every (row, node) pair.

    Entry (i, j) is ``g(a_j @ x_i + b_j)`` with g the layer activation:
    sigmoid ``1/(1+exp(-z))`` or tanh.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-D matrix")
    if X.shape[1] != layer.n_features:
        raise DimensionMismatch(
            f"X has {X.shape[1]} features but the layer expects {layer.n_features}")
    z = X @ layer.input_weights.T + layer.biases
    return ACTIVATIONS[layer.activation](z)


def pseudo_inverse(A, rcond=DEFAULT_RCOND):
    """Moore-Penrose pseudoinverse via SVD.

    Singular values at or below ``rcond`` times the largest are zeroed.
    The result satisfies the four Penrose conditions to numerical
    tolerance for any shape, including rank-deficient input.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("A must be a 2-D matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("A contains non-finite entries")
    if not rcond > 0:
        raise ValueError("rcond must be positive")
    if A.size == 0:
        return np.zeros((A.shape[1], A.shape[0]))
    try:
        u, s, vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"SVD did not converge: {exc}") from exc
    cutoff = rcond * s[0]
    s_inv = np.where(s > cutoff, np.divide(1.0, s, out=np.zeros_like(s), where=s > 0), 0.0)
    return (vt.T * s_inv) @ u.T


def _target_matrix(labels, classes):
    """One-hot +-1 targets: +1 in the true-class column, -1 elsewhere."""
    idx = np.searchsorted(classes, labels)
    if np.any(idx >= classes.size) or np.any(classes[np.minimum(idx, classes.size - 1)] != labels):
        raise ValueError("labels contain values outside the class list")
    T = -np.ones((labels.size, classes.size))
    T[np.arange(labels.size), idx] = 1.0
    return T


def train_elm(data, sample_weights, L, activation="sigmoid", seed=0,
              rcond=DEFAULT_RCOND, classes=None):
    """Fit output weights by weighted least squares on the hidden activations.

    Row i of both H and the target matrix is scaled by
    ``sqrt(w_i / mean(w))`` before the solve; all-equal weights skip the
    scaling entirely, so they reproduce the unweighted solve bit for bit.

    Parameters
    ----------
    data : Dataset
        Training rows; must contain at least two distinct labels.
    sample_weights : array of shape (n,)
        Nonnegative weights with a positive sum.
    classes : array, optional
        The label list to score against (superset of the labels in
        ``data``); defaults to the labels observed in ``data``.
    """
    if not isinstance(data, Dataset):
        raise TypeError("data must be a Dataset")
    w = np.asarray(sample_weights, dtype=np.float64)
    if w.shape != (data.n,):
        raise ValueError(f"sample_weights shape {w.shape} does not match {data.n} rows")
    if np.any(w < 0):
        raise ValueError("sample_weights must be nonnegative")
    if not w.sum() > 0:
        raise ValueError("sample_weights must not be all zero")
    if data.classes.size < 2:
        raise DegenerateData("training data contains a single class")
    if classes is None:
        classes = data.classes
    else:
        classes = np.asarray(classes, dtype=np.int64)

    layer = init_hidden_layer(data.p, L, activation, seed)
    H = hidden_matrix(layer, data.features)
    T = _target_matrix(data.labels, classes)
    if not np.all(w == w[0]):
        scale = np.sqrt(w / w.mean())[:, None]
        H = H * scale
        T = T * scale
    beta = pseudo_inverse(H, rcond) @ T
    return ElmModel(layer, beta, classes)


def predict_elm(model, X):
    """Class scores and argmax labels for a feature matrix.

    Returns ``(labels, scores)`` where ``scores`` is (m, K); ties go to
    the lowest class index. An empty X yields empty outputs.
    """
    H = hidden_matrix(model.hidden, X)
    scores = H @ model.beta
    labels = model.classes[np.argmax(scores, axis=1)]
    return labels, scores
