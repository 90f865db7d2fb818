"""Tabular dataset loading, encoding, and seeded stratified splitting.

CSV cells must all be present; a column is numeric if every cell parses
as a finite float, otherwise the column is treated as categorical and
ordinally encoded (distinct values sorted lexicographically -> 0,1,2...).
Labels are encoded densely in order of first appearance, so decoding a
prediction recovers the original class name.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import TAG_SPLIT, derive_seed, shuffle_inplace


class LoadError(ValueError):
    """A CSV file that cannot become a valid dataset; names the location."""


@dataclass
class Dataset:
    """Dense numeric features with integer class labels in [0, C)."""

    features: np.ndarray          # (n, m) float64
    labels: np.ndarray            # (n,) int64
    class_count: int
    name: str = "dataset"
    feature_names: list[str] | None = None
    class_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError("features must be 2-d")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels misaligned with features")
        if self.class_count < 2:
            raise ValueError("class_count must be >= 2")
        if self.labels.size and (self.labels.min() < 0
                                 or self.labels.max() >= self.class_count):
            raise ValueError("labels outside [0, class_count)")
        if np.any(~np.isfinite(self.features)):
            raise ValueError("features contain non-finite values")
        if not self.class_names:
            self.class_names = [str(c) for c in range(self.class_count)]

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    def validate_full(self) -> None:
        """Load-time invariants: every class present, n >= C."""
        present = np.unique(self.labels)
        if present.size != self.class_count:
            missing = sorted(set(range(self.class_count)) - set(present))
            raise ValueError(f"classes {missing} have no instances")
        if self.n < self.class_count:
            raise ValueError("fewer rows than classes")

    def decode_labels(self, ids) -> list[str]:
        return [self.class_names[int(i)] for i in np.asarray(ids).ravel()]

    def subset(self, indices, name: str | None = None) -> "Dataset":
        """Row subset sharing class metadata (classes may be missing)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx],
                       self.class_count,
                       name=name or self.name,
                       feature_names=self.feature_names,
                       class_names=list(self.class_names))


@dataclass
class SplitPair:
    """Disjoint train/test row split of one dataset."""

    train: Dataset
    test: Dataset
    seed: int
    train_indices: np.ndarray
    test_indices: np.ndarray

    def train_hash(self) -> str:
        """Digest of the train row set; equal splits hash equally."""
        return hashlib.sha1(
            np.sort(self.train_indices).tobytes()).hexdigest()


def _parse_number(cell: str) -> float | None:
    """The cell's float value (possibly nan/inf), or None if not numeric."""
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path, label_column, has_header: bool = True,
             name: str | None = None) -> Dataset:
    """Load a comma-separated file into a validated Dataset.

    ``label_column`` is a header name (requires ``has_header``) or a
    zero-based column index. Errors name the offending file location.
    """
    path = str(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh)]
    rows = [row for row in rows if row]  # drop blank lines
    if not rows:
        raise LoadError(f"{path}: file is empty")

    header: list[str] | None = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        data = rows[1:]
        first_line = 2
    else:
        data = rows
        first_line = 1
    if not data:
        raise LoadError(f"{path}: no data rows")

    width = len(data[0])
    for i, row in enumerate(data):
        if len(row) != width:
            raise LoadError(f"{path}: line {first_line + i} has {len(row)} "
                            f"cells, expected {width} (non-rectangular file)")

    if isinstance(label_column, str):
        if header is None:
            raise LoadError(f"{path}: label column selected by name "
                            f"{label_column!r} but the file has no header")
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise LoadError(f"{path}: no column named {label_column!r}; "
                            f"columns are {header}") from None
    else:
        label_idx = int(label_column)
        if label_idx < 0:
            label_idx += width
        if not 0 <= label_idx < width:
            raise LoadError(f"{path}: label column index {label_column} "
                            f"outside 0..{width - 1}")

    def colname(j: int) -> str:
        return repr(header[j]) if header else f"index {j}"

    for i, row in enumerate(data):
        for j, cell in enumerate(row):
            if cell.strip() == "":
                raise LoadError(f"{path}: empty cell at line {first_line + i}"
                                f", column {colname(j)}")

    feat_cols = [j for j in range(width) if j != label_idx]
    n = len(data)
    X = np.empty((n, len(feat_cols)), np.float64)
    for out_j, j in enumerate(feat_cols):
        cells = [row[j].strip() for row in data]
        parsed = [_parse_number(c) for c in cells]
        if all(v is not None for v in parsed):
            # numeric column: nan/inf cells count as missing values
            for i, v in enumerate(parsed):
                if not math.isfinite(v):
                    raise LoadError(
                        f"{path}: non-finite value {cells[i]!r} at line "
                        f"{first_line + i}, column {colname(j)}")
            X[:, out_j] = parsed
        else:
            # categorical column: ordinal codes in lexicographic order
            codes = {v: k for k, v in enumerate(sorted(set(cells)))}
            X[:, out_j] = [codes[c] for c in cells]

    label_cells = [row[label_idx].strip() for row in data]
    class_names: list[str] = []
    codes = {}
    y = np.empty(n, np.int64)
    for i, cell in enumerate(label_cells):
        if cell not in codes:
            codes[cell] = len(class_names)
            class_names.append(cell)
        y[i] = codes[cell]
    if len(class_names) < 2:
        raise LoadError(f"{path}: only one class ({class_names[0]!r}) "
                        f"present in column {colname(label_idx)}")

    feature_names = ([header[j] for j in feat_cols] if header else None)
    ds = Dataset(X, y, class_count=len(class_names),
                 name=name or path.rsplit("/", 1)[-1].rsplit(".", 1)[0],
                 feature_names=feature_names, class_names=class_names)
    ds.validate_full()
    return ds


def stratified_split(ds: Dataset, train_fraction: float,
                     seed: int) -> SplitPair:
    """Seeded train/test split, stratified by class when feasible.

    Per class, floor(train_fraction * count) rows go to train and the
    remainder to test. When some class is too small for that (its train
    share would floor to zero), the split falls back to a plain shuffle.
    Identical (ds, fraction, seed) always produce the identical split.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    split_seed = derive_seed(seed, TAG_SPLIT)
    classes, counts = np.unique(ds.labels, return_counts=True)
    stratify = all(int(train_fraction * c) >= 1 for c in counts)

    train_idx: list[int] = []
    test_idx: list[int] = []
    if stratify:
        for cls in classes:
            members = list(np.flatnonzero(ds.labels == cls))
            shuffle_inplace(members, derive_seed(split_seed, int(cls)))
            k = int(train_fraction * len(members))
            train_idx.extend(members[:k])
            test_idx.extend(members[k:])
    else:
        members = list(range(ds.n))
        shuffle_inplace(members, split_seed)
        k = int(train_fraction * ds.n)
        k = min(max(k, 1), ds.n - 1)
        train_idx = members[:k]
        test_idx = members[k:]

    train_idx = np.sort(np.asarray(train_idx, dtype=np.int64))
    test_idx = np.sort(np.asarray(test_idx, dtype=np.int64))
    return SplitPair(train=ds.subset(train_idx, f"{ds.name}[train]"),
                     test=ds.subset(test_idx, f"{ds.name}[test]"),
                     seed=seed, train_indices=train_idx,
                     test_indices=test_idx)
