"""Single decision trees with per-instance weights in the split criterion.

Trees are grown to purity by default (no depth cap), splitting on the
weighted information gain of midpoint thresholds. Two induction modes:

* ``random_subspace``: at each node, ceil(sqrt(m)) candidate features are
  drawn without replacement and the best weighted-entropy split wins.
* ``completely_random``: one feature is drawn uniformly at random and the
  threshold uniformly between its min and max at the node.

Instance weights below ``WEIGHT_FLOOR`` (1e-12) are treated as exactly
zero, so a zero-weight row behaves identically to a removed row: it can
contribute neither a split candidate nor leaf mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import WEIGHT_FLOOR, best_split_kernel, grow_tree

RANDOM_SUBSPACE = "random_subspace"
COMPLETELY_RANDOM = "completely_random"
_KIND_CODES = {RANDOM_SUBSPACE: 0, COMPLETELY_RANDOM: 1}


@dataclass(frozen=True)
class SplitRule:
    """Binary split: rows with value <= threshold go left."""

    feature_index: int
    threshold: float


class Tree:
    """Flat-array binary tree; node 0 is the root, leaves have left == -1.

    ``distribution`` rows are weight-normalized class proportions and
    ``support`` rows the raw class weight sums at each node.
    """

    __slots__ = ("feature", "threshold", "left", "right", "distribution",
                 "support", "arity", "class_count")

    def __init__(self, feature, threshold, left, right, distribution,
                 support, arity, class_count):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.distribution = distribution
        self.support = support
        self.arity = arity
        self.class_count = class_count

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.left < 0))

    def is_leaf(self, node: int) -> bool:
        return self.left[node] < 0

    def rule(self, node: int) -> SplitRule:
        if self.is_leaf(node):
            raise ValueError(f"node {node} is a leaf")
        return SplitRule(int(self.feature[node]), float(self.threshold[node]))


def _as_features(features) -> np.ndarray:
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be a 2-d matrix")
    return X


def _as_weights(weights, n: int) -> np.ndarray:
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"weights must have shape ({n},), got {w.shape}")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return w


def weighted_entropy(class_weight_sums) -> float:
    """Entropy (base 2) of the distribution induced by class weight sums.

    Raises ValueError on an all-zero or negative input.
    """
    sums = np.asarray(class_weight_sums, dtype=np.float64)
    if np.any(sums < 0):
        raise ValueError("class weight sums must be nonnegative")
    total = sums.sum()
    if total <= 0:
        raise ValueError("all-zero class weight sums: distribution undefined")
    q = sums[sums > 0] / total
    return float(-(q * np.log2(q)).sum())


def best_split(rows, features, labels, weights, candidate_features,
               n_classes: int | None = None) -> SplitRule | None:
    """Best weighted-information-gain (feature, midpoint) split, or None.

    Scans only ``candidate_features``; returns None when no split has
    positive gain or every candidate is constant on the (positive-weight)
    rows. Gain ties resolve to the lowest feature index, then the lowest
    threshold.
    """
    X = _as_features(features)
    y = np.ascontiguousarray(labels, dtype=np.int64)
    w = _as_weights(weights, X.shape[0])
    idx = np.asarray(list(rows), dtype=np.int64)
    feats = np.unique(np.asarray(list(candidate_features), dtype=np.int64))
    if feats.size == 0:
        return None
    if feats.min() < 0 or feats.max() >= X.shape[1]:
        raise ValueError("candidate feature index out of range")
    idx = idx[w[idx] >= WEIGHT_FLOOR]
    if idx.size < 2:
        return None
    C = int(n_classes) if n_classes is not None else int(y.max()) + 1
    f, thr = best_split_kernel(X, y, w, idx, feats, C)
    if f < 0:
        return None
    return SplitRule(int(f), float(thr))


def fit_tree(rows, features, labels, weights, mode: str, seed: int,
             min_samples_split: int = 2, max_depth: int = 0,
             n_classes: int | None = None) -> Tree:
    """Recursively induce a decision tree over the given rows.

    ``mode`` is ``random_subspace`` or ``completely_random``; ``seed``
    fixes the node-level randomness (candidate features / thresholds).
    ``max_depth`` of 0 means unlimited. Degenerate inputs (pure node,
    too few rows, constant features) yield a single-leaf tree.
    """
    if mode not in _KIND_CODES:
        raise ValueError(f"unknown tree mode {mode!r}")
    X = _as_features(features)
    y = np.ascontiguousarray(labels, dtype=np.int64)
    w = _as_weights(weights, X.shape[0])
    idx = np.asarray(list(rows), dtype=np.int64)
    if idx.size < 1:
        raise ValueError("at least one row is required")
    if w[idx].sum() <= 0:
        raise ValueError("total weight over rows must be positive")
    C = int(n_classes) if n_classes is not None else int(y.max()) + 1
    cap = 2 * idx.size + 1
    feat = np.empty(cap, np.int32)
    thr = np.empty(cap, np.float64)
    left = np.empty(cap, np.int32)
    right = np.empty(cap, np.int32)
    dist = np.empty((cap, C), np.float64)
    support = np.empty((cap, C), np.float64)
    n_cand = int(math.ceil(math.sqrt(X.shape[1])))
    state = np.array([np.uint64(seed % (1 << 64))], dtype=np.uint64)
    n_nodes = grow_tree(X, y, idx, w, C, _KIND_CODES[mode], n_cand,
                        min_samples_split, max_depth, state,
                        feat, thr, left, right, dist, support)
    return Tree(feat[:n_nodes].copy(), thr[:n_nodes].copy(),
                left[:n_nodes].copy(), right[:n_nodes].copy(),
                dist[:n_nodes].copy(), support[:n_nodes].copy(),
                arity=X.shape[1], class_count=C)


def predict_distribution(tree: Tree, x) -> np.ndarray:
    """Route ``x`` to a leaf and return that leaf's class distribution."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    if xv.shape[0] != tree.arity:
        raise ValueError(
            f"expected {tree.arity} features, got {xv.shape[0]}")
    node = 0
    while tree.left[node] >= 0:
        if xv[tree.feature[node]] <= tree.threshold[node]:
            node = tree.left[node]
        else:
            node = tree.right[node]
    return tree.distribution[node].copy()


def trees_equal(a: Tree, b: Tree) -> bool:
    """Structural byte-level equality of two trees."""
    return (a.arity == b.arity and a.class_count == b.class_count
            and np.array_equal(a.feature, b.feature)
            and np.array_equal(a.threshold, b.threshold)
            and np.array_equal(a.left, b.left)
            and np.array_equal(a.right, b.right)
            and np.array_equal(a.distribution, b.distribution)
            and np.array_equal(a.support, b.support))
