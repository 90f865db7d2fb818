"""The level-by-level forest cascade with adaptive instance weighting.

Level 1 trains M forests (alternating random-subspace and completely-
random) on the raw features with unit weights. Every deeper level sees
the original features concatenated with the previous level's M class
vectors (arity m + M*C), trained under the configured weighting strategy
with weights recomputed from the previous level's mean class vectors.

With a screening threshold eta, training instances exit the cascade
early: under the baseline (no weight scheme) when the mean vector is
confident and correct, under a weight scheme when 1 - w >= eta. Exits
are permanent. At prediction time an instance exits as soon as its mean
class vector's max component reaches eta, else it runs to the last level.

Growth stops at max_levels, when validation accuracy (on an internal
stratified holdout) fails to improve for `early_stop_patience` levels
(the model is truncated to the best level), when all instances are
classified perfectly, or when the active set runs out.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ._rng import (TAG_FINAL_FOREST, TAG_HOLDOUT, TAG_LEVEL, TAG_SLOT,
                   derive_seed)
from .dataset import Dataset, stratified_split
from .forest import (STRATEGY_NONE, STRATEGY_RESAMPLE,
                     STRATEGY_WEIGHTED_SPLIT, Forest, cross_fit_class_vectors,
                     fit_forest, forest_class_vectors)
from .tree import COMPLETELY_RANDOM, RANDOM_SUBSPACE
from .weighting import SCHEMES, instance_weights, update_weights

STRATEGY_BASELINE = "baseline"
CASCADE_STRATEGIES = (STRATEGY_BASELINE, STRATEGY_RESAMPLE,
                      STRATEGY_WEIGHTED_SPLIT)


@dataclass
class CascadeConfig:
    """Everything that determines a cascade fit, including its seed."""

    forests_per_level: int = 4
    trees_per_forest: int = 100
    weight_scheme: str | None = None
    strategy: str = STRATEGY_BASELINE
    eta: float | None = None
    max_levels: int = 20
    early_stop_patience: int = 1   # 0 disables the validation holdout
    crossfit_k: int = 3            # <= 1 trains class vectors in-sample
    seed: int = 0
    min_samples_split: int = 2
    max_depth: int = 0             # 0 = unlimited
    holdout_fraction: float = 0.2

    def validate(self) -> None:
        if self.forests_per_level < 1:
            raise ValueError("forests_per_level must be >= 1")
        if self.trees_per_forest < 1:
            raise ValueError("trees_per_forest must be >= 1")
        if self.strategy not in CASCADE_STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy != STRATEGY_BASELINE:
            if self.weight_scheme not in SCHEMES:
                raise ValueError(
                    f"strategy {self.strategy!r} needs a weight scheme "
                    f"from {SCHEMES}, got {self.weight_scheme!r}")
        elif self.weight_scheme is not None:
            raise ValueError("a weight scheme has no effect under the "
                             "baseline strategy; leave it unset")
        if self.eta is not None and not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0, 1]")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ValueError("holdout_fraction must be in (0, 1)")

    def echo(self) -> dict:
        return asdict(self)


def slot_kind(j: int) -> str:
    """Forest kind of level slot j: even slots scan subspaces, odd split
    completely at random (the default 4 slots are 2 + 2)."""
    return RANDOM_SUBSPACE if j % 2 == 0 else COMPLETELY_RANDOM


@dataclass
class CascadeLevel:
    forests: list[Forest]
    eta: float | None


@dataclass
class CascadeModel:
    levels: list[CascadeLevel]
    class_count: int
    input_arity: int
    config: CascadeConfig
    per_level_train_counts: list[int]
    train_exit_levels: np.ndarray      # 0 = ran through every level
    validation_accuracy: list[float]
    stop_reason: str

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def summary(self) -> dict:
        return {
            "levels": self.n_levels,
            "class_count": self.class_count,
            "input_arity": self.input_arity,
            "per_level_train_counts": list(self.per_level_train_counts),
            "validation_accuracy": list(self.validation_accuracy),
            "stop_reason": self.stop_reason,
            "config": self.config.echo(),
        }


def _level_class_vectors(X, y, weights, cfg: CascadeConfig, strategy: str,
                         level_seed: int, n_classes: int):
    """Train the M forests of one level; return (per-instance vectors
    of shape (n, M, C), list of final forests)."""
    n = X.shape[0]
    M = cfg.forests_per_level
    vectors = np.empty((n, M, n_classes), np.float64)
    forests = []
    for j in range(M):
        kind = slot_kind(j)
        slot_seed = derive_seed(level_seed, TAG_SLOT, j)
        if cfg.crossfit_k >= 2 and n >= cfg.crossfit_k:
            v, final, _ = cross_fit_class_vectors(
                X, y, weights, cfg.trees_per_forest, kind, strategy,
                cfg.crossfit_k, slot_seed, cfg.min_samples_split,
                cfg.max_depth, n_classes=n_classes)
        else:
            final = fit_forest(X, y, weights, cfg.trees_per_forest, kind,
                               strategy,
                               derive_seed(slot_seed, TAG_FINAL_FOREST),
                               cfg.min_samples_split, cfg.max_depth,
                               n_classes=n_classes)
            v = final.class_vectors(X)
        vectors[:, j, :] = v
        forests.append(final)
    return vectors, forests


def _augment(base: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Next-level features: original vector then the M class vectors."""
    n = base.shape[0]
    return np.hstack([base, vectors.reshape(n, -1)])


def fit(train: Dataset, cfg: CascadeConfig) -> CascadeModel:
    """Grow a cascade on ``train`` according to ``cfg``."""
    cfg.validate()
    if np.unique(train.labels).size < 2:
        raise ValueError("training data contains a single class")
    C = train.class_count
    m = train.m

    use_holdout = cfg.early_stop_patience >= 1 and cfg.max_levels > 1
    if use_holdout:
        pair = stratified_split(train, 1.0 - cfg.holdout_fraction,
                                derive_seed(cfg.seed, TAG_HOLDOUT))
        core, val = pair.train, pair.test
        if np.unique(core.labels).size < 2:  # holdout ate a class: give up on it
            core, val, use_holdout = train, None, False
    else:
        core, val = train, None

    X0 = core.features
    y0 = core.labels
    n = core.n
    active = np.arange(n)
    X_level = X0
    weights = np.ones(n, np.float64)
    exit_levels = np.zeros(n, np.int64)

    if val is not None:
        val_X0, val_y = val.features, val.labels
        val_alive = np.arange(val.n)
        val_Xlvl = val_X0
        val_labels = np.full(val.n, -1, np.int64)

    levels: list[CascadeLevel] = []
    counts: list[int] = []
    val_history: list[float] = []
    best_acc = -1.0
    best_len = 0
    bad = 0
    stop_reason = "max_levels"

    for q in range(1, cfg.max_levels + 1):
        level_seed = derive_seed(cfg.seed, TAG_LEVEL, q)
        strategy = (STRATEGY_NONE if q == 1
                    or cfg.strategy == STRATEGY_BASELINE else cfg.strategy)
        y_act = y0[active]
        vectors, forests = _level_class_vectors(
            X_level, y_act, weights, cfg, strategy, level_seed, C)
        levels.append(CascadeLevel(forests, cfg.eta))
        counts.append(active.size)
        mean_vec = vectors.mean(axis=1)

        # validation pass mirrors prediction: frozen rows keep their exit
        # prediction, live rows are scored as if this level were the last
        if val is not None:
            if val_alive.size:
                vvec = np.stack([forest_class_vectors(f, val_Xlvl)
                                 for f in forests], axis=1)
                vmean = vvec.mean(axis=1)
                pred = val_labels.copy()
                pred[val_alive] = vmean.argmax(axis=1)
            else:
                pred = val_labels
            acc = float((pred == val_y).mean())
            val_history.append(acc)
            if acc > best_acc:
                best_acc = acc
                best_len = q
                bad = 0
            else:
                bad += 1
                if bad >= cfg.early_stop_patience:
                    stop_reason = "early_stop"
                    break
            if val_alive.size:
                if cfg.eta is not None:
                    vexit = vmean.max(axis=1) >= cfg.eta
                    val_labels[val_alive[vexit]] = vmean[vexit].argmax(axis=1)
                    keepv = ~vexit
                    val_alive = val_alive[keepv]
                    vvec = vvec[keepv]
                if val_alive.size:
                    val_Xlvl = _augment(val_X0[val_alive], vvec)

        if q == cfg.max_levels:
            break

        # recompute weights from this level's mean vectors
        all_perfect = False
        raw_w = None
        if cfg.strategy != STRATEGY_BASELINE:
            wv = update_weights(vectors, y_act, cfg.weight_scheme,
                                normalize=(cfg.strategy == STRATEGY_RESAMPLE))
            all_perfect = wv.all_perfect
            next_weights = wv.weights
            raw_w = instance_weights(mean_vec, y_act, cfg.weight_scheme)
        else:
            next_weights = np.ones(active.size, np.float64)
        if all_perfect:
            stop_reason = "all_perfect"
            break

        # screening: remove exiting instances from the active set for good
        if cfg.eta is not None:
            if cfg.strategy == STRATEGY_BASELINE:
                exits = ((mean_vec.max(axis=1) >= cfg.eta)
                         & (mean_vec.argmax(axis=1) == y_act))
            else:
                exits = (1.0 - raw_w) >= cfg.eta
            exit_levels[active[exits]] = q
            keep = ~exits
            active = active[keep]
            vectors = vectors[keep]
            next_weights = next_weights[keep]
            if active.size < 2 * C:
                stop_reason = "active_exhausted"
                break
            if np.unique(y0[active]).size < 2:
                stop_reason = "active_exhausted"
                break

        X_level = _augment(X0[active], vectors)
        weights = next_weights

    if val is not None and stop_reason == "early_stop":
        levels = levels[:best_len]
        counts = counts[:best_len]
        exit_levels[exit_levels > best_len] = 0

    return CascadeModel(levels=levels, class_count=C, input_arity=m,
                        config=replace(cfg),
                        per_level_train_counts=counts,
                        train_exit_levels=exit_levels,
                        validation_accuracy=val_history,
                        stop_reason=stop_reason)


def predict_batch(model: CascadeModel, X, return_trace: bool = False):
    """Predict every row of X. Returns (labels, mean class vectors); with
    ``return_trace`` also the 1-based level at which each row exited.

    Ties in the argmax resolve to the lowest class id.
    """
    Xq = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    if Xq.shape[1] != model.input_arity:
        raise ValueError(f"expected {model.input_arity} features, "
                         f"got {Xq.shape[1]}")
    nq = Xq.shape[0]
    C = model.class_count
    labels = np.empty(nq, np.int64)
    probs = np.empty((nq, C), np.float64)
    exit_at = np.empty(nq, np.int64)

    alive = np.arange(nq)
    Xlvl = Xq
    n_levels = len(model.levels)
    for qi, level in enumerate(model.levels):
        last = qi == n_levels - 1
        vecs = np.stack([forest_class_vectors(f, Xlvl)
                         for f in level.forests], axis=1)
        mean = vecs.mean(axis=1)
        if last:
            exits = np.ones(alive.size, bool)
        elif level.eta is not None:
            exits = mean.max(axis=1) >= level.eta
        else:
            exits = np.zeros(alive.size, bool)
        if exits.any():
            rows = alive[exits]
            labels[rows] = mean[exits].argmax(axis=1)
            probs[rows] = mean[exits]
            exit_at[rows] = qi + 1
        keep = ~exits
        alive = alive[keep]
        if alive.size == 0:
            break
        Xlvl = _augment(Xq[alive], vecs[keep])

    if return_trace:
        return labels, probs, exit_at
    return labels, probs


def predict(model: CascadeModel, x):
    """Predict one instance; returns (class id, mean class vector)."""
    labels, probs = predict_batch(model, np.asarray(x, dtype=np.float64)[None, :])
    return int(labels[0]), probs[0]
