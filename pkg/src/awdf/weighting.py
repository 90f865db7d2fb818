"""Instance weighting and confidence screening for the cascade.

Each instance's weight at the next level is a function of how well the
previous level classified it: zero when the mean class vector equals the
one-hot target, growing toward its maximum as the mass moves to wrong
classes. Four schemes are supported, named by the transform applied to
p = v[y], the probability assigned to the true class:

    "1-w"     : 1 - p
    "1-w2"    : 1 - p**2
    "1-wsqrt" : 1 - sqrt(p)
    "l2"      : euclidean distance between v and onehot(y)  (max sqrt(2))

Screening exits an instance early, either on the mean vector itself
(max component >= eta) or on its weight (1 - w >= eta); both comparisons
are inclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCHEME_ONE_MINUS_W = "1-w"
SCHEME_ONE_MINUS_W2 = "1-w2"
SCHEME_ONE_MINUS_WSQRT = "1-wsqrt"
SCHEME_L2 = "l2"
SCHEMES = (SCHEME_ONE_MINUS_W, SCHEME_ONE_MINUS_W2,
           SCHEME_ONE_MINUS_WSQRT, SCHEME_L2)


@dataclass
class WeightVector:
    """Per-instance nonnegative weights for the next level's training."""

    weights: np.ndarray
    normalized: bool
    all_perfect: bool = False


def onehot(label: int, n_classes: int) -> np.ndarray:
    """Unit vector with a single 1 at ``label``."""
    if not 0 <= label < n_classes:
        raise ValueError(f"label {label} outside [0, {n_classes})")
    o = np.zeros(n_classes, np.float64)
    o[label] = 1.0
    return o


def mean_class_vector(vectors) -> np.ndarray:
    """Componentwise mean of the class vectors produced by one level."""
    V = np.asarray(vectors, dtype=np.float64)
    if V.size == 0:
        raise ValueError("cannot take the mean of zero class vectors")
    if V.ndim == 1:
        V = V[None, :]
    return V.mean(axis=0)


def instance_weights(mean_vectors, labels, scheme: str) -> np.ndarray:
    """Vectorized weights for rows of ``mean_vectors`` given true labels.

    Tiny negative values from float roundoff are clipped to zero so a
    perfectly classified instance has weight exactly 0.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown weight scheme {scheme!r}; "
                         f"expected one of {SCHEMES}")
    V = np.asarray(mean_vectors, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if V.ndim != 2 or V.shape[0] != y.shape[0]:
        raise ValueError("mean_vectors and labels are misaligned")
    p = V[np.arange(V.shape[0]), y]
    if scheme == SCHEME_ONE_MINUS_W:
        w = 1.0 - p
    elif scheme == SCHEME_ONE_MINUS_W2:
        w = 1.0 - p * p
    elif scheme == SCHEME_ONE_MINUS_WSQRT:
        w = 1.0 - np.sqrt(p)
    else:
        diff = V.copy()
        diff[np.arange(V.shape[0]), y] -= 1.0
        w = np.sqrt((diff * diff).sum(axis=1))
    return np.maximum(w, 0.0)


def instance_weight(v, y: int, scheme: str) -> float:
    """Weight of a single instance from its mean class vector."""
    V = np.asarray(v, dtype=np.float64)
    return float(instance_weights(V[None, :], np.array([y]), scheme)[0])


def screening_indicator(v, eta: float) -> int:
    """1 when the vector's max component reaches eta (inclusive)."""
    return int(np.max(np.asarray(v, dtype=np.float64)) >= eta)


def weight_screening_indicator(w: float, eta: float) -> int:
    """1 when 1 - w reaches eta (inclusive): the instance exits."""
    return int(1.0 - w >= eta)


def update_weights(level_vectors, labels, scheme: str,
                   normalize: bool) -> WeightVector:
    """Next-level weights from one level's per-instance class vectors.

    ``level_vectors`` has shape (n, M, C): M forest class vectors per
    instance. Weights are computed from the per-instance mean vector.
    If every instance is classified perfectly (all weights zero), uniform
    weights are returned with ``all_perfect`` set so the cascade can stop.
    """
    V = np.asarray(level_vectors, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if V.ndim != 3:
        raise ValueError("level_vectors must have shape (n, M, C)")
    if V.shape[0] != y.shape[0]:
        raise ValueError(f"{V.shape[0]} vector rows vs {y.shape[0]} labels")
    means = V.mean(axis=1)
    w = instance_weights(means, y, scheme)
    total = w.sum()
    if total <= 0.0:
        n = w.shape[0]
        return WeightVector(np.full(n, 1.0 / n), normalized=True,
                            all_perfect=True)
    if normalize:
        return WeightVector(w / total, normalized=True)
    return WeightVector(w, normalized=False)
