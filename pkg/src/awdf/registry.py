"""Registry of benchmark datasets: bundled fixtures and UCI tables.

The five UCI datasets used by the benchmark harness are not shipped in
this repository (UCI's terms ask users to obtain data from the source);
``scripts/fetch_uci_data.py`` downloads and converts them into the
package data directory. Every dataset is validated against its expected
(rows, features, classes) at load time.

Canonical on-disk form: UTF-8 CSV, header ``f0..f{m-1},label``, label
column last.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .dataset import Dataset, load_csv


class DatasetNotFoundError(FileNotFoundError):
    """A registered dataset file is absent from the data directory."""


@dataclass(frozen=True)
class DatasetSpec:
    key: str
    title: str
    filename: str
    n: int
    m: int
    classes: int
    source: str
    synthetic: bool = False


UCI_DATASETS = {
    "haberman": DatasetSpec(
        key="haberman", title="Haberman's Breast Cancer Survival",
        filename="haberman.csv", n=306, m=3, classes=2,
        source="https://archive.ics.uci.edu/ml/machine-learning-databases/"
               "haberman/haberman.data"),
    "seeds": DatasetSpec(
        key="seeds", title="Seeds (wheat kernels)",
        filename="seeds.csv", n=210, m=7, classes=3,
        source="https://archive.ics.uci.edu/ml/machine-learning-databases/"
               "00236/seeds_dataset.txt"),
    "tae": DatasetSpec(
        key="tae", title="Teaching Assistant Evaluation",
        filename="tae.csv", n=151, m=5, classes=3,
        source="https://archive.ics.uci.edu/ml/machine-learning-databases/"
               "tae/tae.data"),
    "ion": DatasetSpec(
        key="ion", title="Ionosphere",
        filename="ion.csv", n=351, m=34, classes=2,
        source="https://archive.ics.uci.edu/ml/machine-learning-databases/"
               "ionosphere/ionosphere.data"),
    # UCI counts 20 attributes for this table, but one of them is the class
    # label itself; the feature matrix has 19 columns.
    "diabet": DatasetSpec(
        key="diabet", title="Diabetic Retinopathy Debrecen",
        filename="diabet.csv", n=1151, m=19, classes=2,
        source="https://archive.ics.uci.edu/ml/machine-learning-databases/"
               "00329/messidor_features.arff"),
}

FIXTURE_DATASETS = {
    "blobs2": DatasetSpec(
        key="blobs2", title="Two well-separated Gaussian blobs (synthetic)",
        filename="blobs2.csv", n=300, m=4, classes=2,
        source="scripts/make_fixture_data.py", synthetic=True),
    "noisy3": DatasetSpec(
        key="noisy3", title="Three overlapping Gaussian blobs (synthetic)",
        filename="noisy3.csv", n=240, m=3, classes=3,
        source="scripts/make_fixture_data.py", synthetic=True),
}

ALL_DATASETS = {**UCI_DATASETS, **FIXTURE_DATASETS}


def data_dir() -> Path:
    """Package data directory, overridable with AWDF_DATA_DIR."""
    override = os.environ.get("AWDF_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


def dataset_path(key: str) -> Path:
    return data_dir() / ALL_DATASETS[key].filename


def is_available(key: str) -> bool:
    return dataset_path(key).is_file()


def missing_uci() -> list[str]:
    """UCI dataset keys whose files are not present."""
    return [k for k in UCI_DATASETS if not is_available(k)]


def load(key: str) -> Dataset:
    """Load a registered dataset and validate its shape against the spec."""
    if key not in ALL_DATASETS:
        raise KeyError(f"unknown dataset {key!r}; "
                       f"registered: {sorted(ALL_DATASETS)}")
    spec = ALL_DATASETS[key]
    path = dataset_path(key)
    if not path.is_file():
        raise DatasetNotFoundError(
            f"{spec.title}: {path} not found. Run scripts/fetch_uci_data.py "
            f"to download it from {spec.source}")
    ds = load_csv(path, label_column="label", has_header=True, name=key)
    if (ds.n, ds.m, ds.class_count) != (spec.n, spec.m, spec.classes):
        raise ValueError(
            f"{spec.title}: expected n={spec.n}, m={spec.m}, "
            f"C={spec.classes}, loaded n={ds.n}, m={ds.m}, "
            f"C={ds.class_count} from {path}")
    return ds


def _canonical_csv(rows: list[list[str]]) -> str:
    """Rows of feature strings + label string -> canonical CSV text."""
    m = len(rows[0]) - 1
    header = ",".join([f"f{j}" for j in range(m)] + ["label"])
    lines = [header] + [",".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def convert_raw(key: str, raw_text: str) -> str:
    """Convert a raw UCI download into the canonical CSV layout.

    Handles the source formats of the five registered tables: plain CSV
    (haberman, tae, ion), whitespace-separated (seeds), and ARFF (diabet).
    """
    if key not in UCI_DATASETS:
        raise KeyError(f"no raw converter for {key!r}")
    rows: list[list[str]] = []
    if key == "seeds":
        for line in raw_text.splitlines():
            parts = line.split()
            if parts:
                rows.append(parts)
    elif key == "diabet":
        for line in raw_text.splitlines():
            s = line.strip()
            if not s or s.startswith("%") or s.startswith("@"):
                continue
            rows.append([c.strip() for c in s.split(",")])
    else:
        for line in raw_text.splitlines():
            s = line.strip()
            if s:
                rows.append([c.strip() for c in s.split(",")])
    if not rows:
        raise ValueError(f"{key}: no data rows found in raw text")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ValueError(f"{key}: raw row {i + 1} has {len(r)} fields, "
                             f"expected {width}")
    return _canonical_csv(rows)
