"""Forests of weighted trees and their per-instance class vectors.

A forest holds T trees of one kind, trained under one weighting strategy:

* ``none``: plain bootstrap, unit weights (level-1 / baseline forests).
* ``resample``: each tree's bootstrap is drawn from the weight-proportional
  distribution; the tree itself then trains with unit weights.
* ``weighted_split``: plain bootstrap, but the instances' weights enter
  the entropy of the splitting rule (and the leaf distributions).

Training-time class vectors for stacking levels come from
``cross_fit_class_vectors``: each instance is predicted by a forest that
never saw it (stratified k-fold), while a final forest trained on all
instances serves held-out data at prediction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import fit_forest_kernel, predict_forest_kernel
from ._rng import (TAG_FINAL_FOREST, TAG_FOLD_ASSIGN, TAG_FOLD_FOREST,
                   TAG_TREE, derive_seed, shuffle_inplace)
from .tree import (COMPLETELY_RANDOM, RANDOM_SUBSPACE, Tree, _as_features,
                   _as_weights, _KIND_CODES)

STRATEGY_NONE = "none"
STRATEGY_RESAMPLE = "resample"
STRATEGY_WEIGHTED_SPLIT = "weighted_split"
_STRATEGY_CODES = {STRATEGY_NONE: 0, STRATEGY_RESAMPLE: 1,
                   STRATEGY_WEIGHTED_SPLIT: 2}


@dataclass
class Forest:
    """Trained forest; all trees live in shared flat slabs."""

    kind: str
    strategy: str
    trained_arity: int
    class_count: int
    feature: np.ndarray       # (T, max_nodes) int32
    threshold: np.ndarray     # (T, max_nodes) float64
    left: np.ndarray          # (T, max_nodes) int32
    right: np.ndarray         # (T, max_nodes) int32
    distribution: np.ndarray  # (T, max_nodes, C) float64
    support: np.ndarray       # (T, max_nodes, C) float64
    n_nodes: np.ndarray = field(repr=False)  # (T,) int64

    @property
    def n_trees(self) -> int:
        return self.feature.shape[0]

    def tree(self, t: int) -> Tree:
        """View of tree ``t`` as a standalone Tree."""
        k = int(self.n_nodes[t])
        return Tree(self.feature[t, :k], self.threshold[t, :k],
                    self.left[t, :k], self.right[t, :k],
                    self.distribution[t, :k], self.support[t, :k],
                    arity=self.trained_arity, class_count=self.class_count)

    def class_vectors(self, X) -> np.ndarray:
        return forest_class_vectors(self, X)

    def class_vector(self, x) -> np.ndarray:
        return forest_class_vector(self, x)


def fit_forest(features, labels, weights, n_trees: int, kind: str,
               strategy: str, seed: int, min_samples_split: int = 2,
               max_depth: int = 0, n_classes: int | None = None) -> Forest:
    """Train ``n_trees`` trees; each tree's stream is derived from
    (seed, tree index), so growing the forest never perturbs earlier trees.

    Raises ValueError when the weights sum to zero (the cascade substitutes
    uniform weights before it ever gets here).
    """
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if kind not in _KIND_CODES:
        raise ValueError(f"unknown forest kind {kind!r}")
    if strategy not in _STRATEGY_CODES:
        raise ValueError(f"unknown strategy {strategy!r}")
    X = _as_features(features)
    y = np.ascontiguousarray(labels, dtype=np.int64)
    n = X.shape[0]
    if n < 1:
        raise ValueError("at least one training row is required")
    w = _as_weights(weights, n)
    if w.sum() <= 0:
        raise ValueError("weights sum to zero: nothing to train on")
    C = int(n_classes) if n_classes is not None else int(y.max()) + 1

    seeds = np.empty(n_trees, np.uint64)
    for t in range(n_trees):
        seeds[t] = derive_seed(seed, TAG_TREE, t)
    cap = 2 * n + 1
    feat = np.empty((n_trees, cap), np.int32)
    thr = np.empty((n_trees, cap), np.float64)
    left = np.empty((n_trees, cap), np.int32)
    right = np.empty((n_trees, cap), np.int32)
    dist = np.empty((n_trees, cap, C), np.float64)
    support = np.empty((n_trees, cap, C), np.float64)
    nn = np.empty(n_trees, np.int64)
    fit_forest_kernel(X, y, w, C, n_trees, _KIND_CODES[kind],
                      _STRATEGY_CODES[strategy], seeds, min_samples_split,
                      max_depth, feat, thr, left, right, dist, support, nn)
    k = int(nn.max())
    return Forest(kind=kind, strategy=strategy, trained_arity=X.shape[1],
                  class_count=C,
                  feature=np.ascontiguousarray(feat[:, :k]),
                  threshold=np.ascontiguousarray(thr[:, :k]),
                  left=np.ascontiguousarray(left[:, :k]),
                  right=np.ascontiguousarray(right[:, :k]),
                  distribution=np.ascontiguousarray(dist[:, :k]),
                  support=np.ascontiguousarray(support[:, :k]),
                  n_nodes=nn)


def forest_class_vectors(forest: Forest, X) -> np.ndarray:
    """Tree-averaged class distribution for every row of ``X``."""
    Xq = _as_features(X)
    if Xq.shape[1] != forest.trained_arity:
        raise ValueError(f"expected {forest.trained_arity} features, "
                         f"got {Xq.shape[1]}")
    out = np.zeros((Xq.shape[0], forest.class_count), np.float64)
    predict_forest_kernel(Xq, forest.feature, forest.threshold, forest.left,
                          forest.right, forest.distribution, out)
    return out


def forest_class_vector(forest: Forest, x) -> np.ndarray:
    """Tree-averaged class distribution for a single instance."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    return forest_class_vectors(forest, xv[None, :])[0]


def stratified_folds(labels, k: int, seed: int) -> np.ndarray:
    """Deterministic stratified fold ids in [0, k) for every instance.

    Instances are shuffled within each class and dealt round-robin with a
    global counter, so folds stay balanced even with tiny classes.
    """
    y = np.asarray(labels)
    n = y.shape[0]
    if k < 2:
        raise ValueError("k must be >= 2")
    if n < k:
        raise ValueError(f"cannot make {k} nonempty folds from {n} rows")
    folds = np.empty(n, np.int64)
    counter = 0
    for cls in np.unique(y):
        members = list(np.flatnonzero(y == cls))
        shuffle_inplace(members, derive_seed(seed, TAG_FOLD_ASSIGN, int(cls)))
        for r in members:
            folds[r] = counter % k
            counter += 1
    return folds


def cross_fit_class_vectors(features, labels, weights, n_trees: int,
                            kind: str, strategy: str, k: int, seed: int,
                            min_samples_split: int = 2, max_depth: int = 0,
                            n_classes: int | None = None):
    """Out-of-fold class vectors plus a final forest on all instances.

    Returns ``(vectors, final_forest, folds)`` where ``vectors[i]`` was
    produced by the fold forest whose training folds exclude instance i.
    A fold whose training complement carries zero total weight falls back
    to unit weights for that one forest (nothing else to train on).
    """
    X = _as_features(features)
    y = np.ascontiguousarray(labels, dtype=np.int64)
    w = _as_weights(weights, X.shape[0])
    C = int(n_classes) if n_classes is not None else int(y.max()) + 1
    folds = stratified_folds(y, k, seed)
    vectors = np.empty((X.shape[0], C), np.float64)
    for f in range(k):
        held = folds == f
        train = ~held
        w_tr = w[train]
        if w_tr.sum() <= 0:
            w_tr = np.ones(w_tr.shape[0], np.float64)
        sub = fit_forest(X[train], y[train], w_tr, n_trees, kind, strategy,
                         derive_seed(seed, TAG_FOLD_FOREST, f),
                         min_samples_split, max_depth, n_classes=C)
        vectors[held] = sub.class_vectors(X[held])
    final = fit_forest(X, y, w, n_trees, kind, strategy,
                       derive_seed(seed, TAG_FINAL_FOREST),
                       min_samples_split, max_depth, n_classes=C)
    return vectors, final, folds
