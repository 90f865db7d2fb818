#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture datasets.

The CSVs are committed; this script exists so their provenance is
reproducible. blobs2 is nearly separable (most mean class vectors become
confident after one level), noisy3 overlaps enough that accuracy stays
well below 1.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from awdf import registry  # noqa: E402


def _write(key: str, X: np.ndarray, y: np.ndarray) -> None:
    spec = registry.ALL_DATASETS[key]
    path = registry.data_dir() / spec.filename
    m = X.shape[1]
    lines = [",".join([f"f{j}" for j in range(m)] + ["label"])]
    for row, label in zip(X, y):
        lines.append(",".join(f"{v:.6f}" for v in row) + f",{int(label)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    ds = registry.load(key)
    print(f"{key}: wrote {path} (n={ds.n}, m={ds.m}, C={ds.class_count})")


def main() -> None:
    rng = np.random.default_rng(20240817)

    # blobs2: two 4-d Gaussians, centers 4 sigma apart
    n_half = 150
    X0 = rng.normal(loc=0.0, scale=1.0, size=(n_half, 4))
    X1 = rng.normal(loc=4.0, scale=1.0, size=(n_half, 4))
    X = np.vstack([X0, X1])
    y = np.array([0] * n_half + [1] * n_half)
    order = rng.permutation(X.shape[0])
    _write("blobs2", X[order], y[order])

    # noisy3: three 3-d Gaussians with heavy overlap
    n_c = 80
    centers = np.array([[0.0, 0.0, 0.0], [1.5, 0.0, 0.5], [0.5, 1.5, 1.0]])
    parts = [rng.normal(loc=c, scale=1.0, size=(n_c, 3)) for c in centers]
    X = np.vstack(parts)
    y = np.repeat(np.arange(3), n_c)
    order = rng.permutation(X.shape[0])
    _write("noisy3", X[order], y[order])


if __name__ == "__main__":
    main()
