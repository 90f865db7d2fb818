#!/usr/bin/env python3
"""Download the five UCI benchmark tables into the package data directory.

The files are small (the largest is ~300 KB). They are fetched from the
UCI Machine Learning Repository, converted to the canonical CSV layout,
and validated against the expected (rows, features, classes). Respect
UCI's citation policy when publishing results derived from them.

Usage:
    python scripts/fetch_uci_data.py [key ...]     # default: all missing
"""

import io
import sys
import urllib.request
import zipfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from awdf import registry  # noqa: E402

# Fallback ZIP endpoints (new-style UCI static hosting) with the archive
# member holding the raw data.
ZIP_SOURCES = {
    "haberman": ("https://archive.ics.uci.edu/static/public/43/"
                 "haberman+s+survival.zip", "haberman.data"),
    "seeds": ("https://archive.ics.uci.edu/static/public/236/seeds.zip",
              "seeds_dataset.txt"),
    "tae": ("https://archive.ics.uci.edu/static/public/102/"
            "teaching+assistant+evaluation.zip", "tae.data"),
    "ion": ("https://archive.ics.uci.edu/static/public/52/ionosphere.zip",
            "ionosphere.data"),
    "diabet": ("https://archive.ics.uci.edu/static/public/329/"
               "diabetic+retinopathy+debrecen+data+set.zip",
               "messidor_features.arff"),
}


def _download(url: str) -> bytes:
    req = urllib.request.Request(url, headers={"User-Agent": "awdf-fetch"})
    with urllib.request.urlopen(req, timeout=60) as resp:
        return resp.read()


def fetch(key: str) -> Path:
    spec = registry.UCI_DATASETS[key]
    raw = None
    errors = []
    try:
        raw = _download(spec.source).decode("utf-8", errors="replace")
    except Exception as exc:  # noqa: BLE001 - report and try the fallback
        errors.append(f"{spec.source}: {exc}")
    if raw is None and key in ZIP_SOURCES:
        url, member = ZIP_SOURCES[key]
        try:
            blob = _download(url)
            with zipfile.ZipFile(io.BytesIO(blob)) as zf:
                raw = zf.read(member).decode("utf-8", errors="replace")
        except Exception as exc:  # noqa: BLE001
            errors.append(f"{url}: {exc}")
    if raw is None:
        raise RuntimeError(f"could not fetch {key}:\n  " + "\n  ".join(errors))

    text = registry.convert_raw(key, raw)
    out = registry.dataset_path(key)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    ds = registry.load(key)  # validates n/m/C
    print(f"{key}: wrote {out} (n={ds.n}, m={ds.m}, C={ds.class_count})")
    return out


def main(argv: list[str]) -> int:
    keys = argv or registry.missing_uci()
    if not keys:
        print("all UCI datasets already present")
        return 0
    failures = 0
    for key in keys:
        if key not in registry.UCI_DATASETS:
            print(f"unknown dataset {key!r}; known: "
                  f"{sorted(registry.UCI_DATASETS)}")
            failures += 1
            continue
        try:
            fetch(key)
        except Exception as exc:  # noqa: BLE001
            print(f"{key}: FAILED - {exc}")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
