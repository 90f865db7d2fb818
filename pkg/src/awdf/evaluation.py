"""Benchmark protocol: repeated random splits, sweeps, timing, t-tests.

``evaluate`` runs R independent stratified 80/20 splits (the paper-style
repeated holdout), fitting one cascade per split and scoring test
accuracy. Split seeds depend only on (base_seed, repetition), so two
configurations evaluated with the same base seed see identical splits
and can be compared pairwise.

``paired_t_test`` is the cross-dataset comparison of two classifiers:
a one-sample Student t-test on per-dataset accuracy differences.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from . import cascade
from ._rng import TAG_FIT, TAG_REPETITION, TAG_SPLIT, derive_seed
from .cascade import CascadeConfig
from .dataset import Dataset, stratified_split

CSV_COLUMNS = ("dataset", "scheme", "strategy", "eta", "trees", "repetition",
               "seed", "accuracy", "fit_seconds", "levels")


@dataclass
class RunResult:
    """Aggregate of one (dataset, config) evaluation."""

    dataset: str
    config: dict
    repetitions: int
    accuracies: list[float]
    mean_accuracy: float
    std_accuracy: float
    mean_fit_seconds: float
    fit_seconds: list[float]
    levels_grown: list[int]
    seeds: list[int]
    split_hashes: list[str]


@dataclass
class TTestResult:
    """One-sample t-test of paired differences against zero mean."""

    mean_difference: float
    t_statistic: float
    p_value: float
    ci95: tuple[float, float]
    degrees_of_freedom: int


@dataclass
class FitTiming:
    mean_seconds: float
    std_seconds: float
    seconds: list[float]


def _run_repetition(ds: Dataset, cfg: CascadeConfig, base_seed: int, rep: int,
                    train_fraction: float):
    rep_seed = derive_seed(base_seed, TAG_REPETITION, rep)
    pair = stratified_split(ds, train_fraction, derive_seed(rep_seed, TAG_SPLIT))
    run_cfg = replace(cfg, seed=derive_seed(rep_seed, TAG_FIT))
    t0 = time.perf_counter()
    model = cascade.fit(pair.train, run_cfg)
    fit_seconds = time.perf_counter() - t0
    pred, _ = cascade.predict_batch(model, pair.test.features)
    accuracy = float((pred == pair.test.labels).mean())
    return rep, accuracy, fit_seconds, model.n_levels, run_cfg.seed, pair.train_hash()


def evaluate(ds: Dataset, cfg: CascadeConfig, repetitions: int, base_seed: int,
             train_fraction: float = 0.8, n_jobs: int = 1) -> RunResult:
    """Repeated-holdout evaluation; deterministic given ``base_seed``.

    ``std_accuracy`` is the sample standard deviation (ddof=1; 0.0 for a
    single repetition). ``n_jobs`` > 1 runs repetitions in parallel
    processes; aggregation order is fixed by repetition index either way.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    cfg.validate()
    args = [(ds, cfg, base_seed, rep, train_fraction)
            for rep in range(1, repetitions + 1)]
    if n_jobs > 1 and repetitions > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(_run_repetition_star, args))
    else:
        outcomes = [_run_repetition(*a) for a in args]
    outcomes.sort(key=lambda r: r[0])
    accs = [o[1] for o in outcomes]
    times = [o[2] for o in outcomes]
    levels = [o[3] for o in outcomes]
    seeds = [o[4] for o in outcomes]
    hashes = [o[5] for o in outcomes]
    return RunResult(
        dataset=ds.name, config=cfg.echo(), repetitions=repetitions,
        accuracies=accs, mean_accuracy=float(np.mean(accs)),
        std_accuracy=float(np.std(accs, ddof=1)) if repetitions > 1 else 0.0,
        mean_fit_seconds=float(np.mean(times)), fit_seconds=times,
        levels_grown=levels, seeds=seeds, split_hashes=hashes)


def _run_repetition_star(args):
    return _run_repetition(*args)


def sweep_trees(ds: Dataset, cfg: CascadeConfig, tree_counts, repetitions: int,
                base_seed: int, train_fraction: float = 0.8,
                n_jobs: int = 1) -> list[RunResult]:
    """One evaluation per tree count, on identical splits across counts."""
    counts = list(tree_counts)
    if not counts or any(t < 1 for t in counts):
        raise ValueError("tree_counts must be nonempty with entries >= 1")
    return [evaluate(ds, replace(cfg, trees_per_forest=int(t)), repetitions,
                     base_seed, train_fraction, n_jobs) for t in counts]


def paired_t_test(a, b) -> TTestResult:
    """Two-sided t-test on paired differences a_i - b_i against mean 0.

    The Student CDF comes from the regularized incomplete beta function
    (scipy). Raises ValueError on fewer than two pairs or zero-variance
    differences (p is undefined there).
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape or av.ndim != 1:
        raise ValueError("paired samples must be equal-length 1-d arrays")
    n = av.shape[0]
    if n < 2:
        raise ValueError("need at least two pairs")
    d = av - bv
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise ValueError("differences have zero variance: t is undefined")
    mean = float(np.mean(d))
    se = sd / np.sqrt(n)
    t = mean / se
    df = n - 1
    p = float(2.0 * stats.t.sf(abs(t), df))
    tcrit = float(stats.t.ppf(0.975, df))
    return TTestResult(mean_difference=mean, t_statistic=float(t), p_value=p,
                       ci95=(mean - tcrit * se, mean + tcrit * se),
                       degrees_of_freedom=df)


def measure_fit_time(ds: Dataset, cfg: CascadeConfig, repetitions: int,
                     base_seed: int, train_fraction: float = 0.8) -> FitTiming:
    """Wall-clock fit times (monotonic clock), one per repetition.

    Always sequential so timings do not contend with each other; only the
    fit call is timed, never loading or splitting.
    """
    times = [_run_repetition(ds, cfg, base_seed, rep, train_fraction)[2]
             for rep in range(1, repetitions + 1)]
    return FitTiming(mean_seconds=float(np.mean(times)),
                     std_seconds=float(np.std(times, ddof=1)) if len(times) > 1
                     else 0.0,
                     seconds=times)


def result_rows(result: RunResult) -> list[dict]:
    """Flatten a RunResult into one CSV row per repetition."""
    cfg = result.config
    rows = []
    for i in range(result.repetitions):
        rows.append({
            "dataset": result.dataset,
            "scheme": cfg.get("weight_scheme") or "none",
            "strategy": cfg.get("strategy"),
            "eta": "" if cfg.get("eta") is None else repr(cfg["eta"]),
            "trees": cfg.get("trees_per_forest"),
            "repetition": i + 1,
            "seed": result.seeds[i],
            "accuracy": repr(result.accuracies[i]),
            "fit_seconds": f"{result.fit_seconds[i]:.6f}",
            "levels": result.levels_grown[i],
        })
    return rows


def write_csv(path, rows) -> None:
    """Write report rows with the fixed column order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
