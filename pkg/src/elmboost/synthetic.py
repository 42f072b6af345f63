"""Small synthetic datasets so the whole pipeline runs without downloads."""

from __future__ import annotations

import numpy as np

from .dataset import Dataset


def make_blobs(n=200, seed=0):
    """Two linearly separable 2-D squares of points, labels 0/1.

    The squares sit at (0,0) and (3,3) with half-width 0.5, so the gap
    between the classes is 2*sqrt(2), comfortably above a unit margin.
    """
    rng = np.random.default_rng(seed)
    half = n // 2
    a = rng.uniform(-0.5, 0.5, size=(half, 2))
    b = rng.uniform(-0.5, 0.5, size=(n - half, 2)) + 3.0
    X = np.vstack([a, b])
    y = np.concatenate([np.zeros(half, dtype=np.int64), np.ones(n - half, dtype=np.int64)])
    order = rng.permutation(n)
    return Dataset(X[order], y[order])


def make_gaussians3(n=300, seed=0):
    """Three Gaussian clusters at triangle corners; mildly overlapping."""
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [4.0, 0.0], [2.0, 3.5]])
    counts = [n // 3, n // 3, n - 2 * (n // 3)]
    parts, labels = [], []
    for k, (center, count) in enumerate(zip(centers, counts)):
        parts.append(rng.normal(0.0, 0.8, size=(count, 2)) + center)
        labels.append(np.full(count, k, dtype=np.int64))
    X = np.vstack(parts)
    y = np.concatenate(labels)
    order = rng.permutation(n)
    return Dataset(X[order], y[order])


def make_xor(n=400, seed=0):
    """Classic XOR layout: four blobs at (+-1, +-1), label by sign parity."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1.0, 1.0, size=(n, 2))
    X += np.sign(X) * 0.1  # push points off the axes
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(np.int64)
    return Dataset(X, y)


def make_rings(n=400, seed=0):
    """Two concentric rings; not linearly separable."""
    rng = np.random.default_rng(seed)
    half = n // 2
    radii = np.concatenate([
        rng.uniform(0.0, 0.5, size=half),
        rng.uniform(0.75, 1.25, size=n - half),
    ])
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    X = np.column_stack([radii * np.cos(theta), radii * np.sin(theta)])
    y = np.concatenate([np.zeros(half, dtype=np.int64), np.ones(n - half, dtype=np.int64)])
    order = rng.permutation(n)
    return Dataset(X[order], y[order])
