#!/usr/bin/env python3
"""Obtain the benchmark dataset files into data/.

The loaders read the original UCI distribution formats:

  data/iris.data
      https://archive.ics.uci.edu/ml/machine-learning-databases/iris/iris.data
      150 rows: 4 floats + species string.
  data/wdbc.data
      https://archive.ics.uci.edu/ml/machine-learning-databases/breast-cancer-wisconsin/wdbc.data
      569 rows: id, 'M'/'B' diagnosis, 30 floats.
  data/data_banknote_authentication.txt
      https://archive.ics.uci.edu/ml/machine-learning-databases/00267/data_banknote_authentication.txt
      1372 rows: 4 floats + 0/1 class.

This script first tries to download each missing file from the URL
above.  Without network access it falls back to regenerating iris and
wdbc from scikit-learn's bundled copies of the same UCI data (values
identical; wdbc row ids are not shipped by scikit-learn, so synthetic
sequential ids are written in the id column - the loader discards ids
anyway).  The banknote dataset is measured image statistics with no
offline source, so it cannot be regenerated; place the file manually if
downloads are unavailable.
"""

from __future__ import annotations

import sys
import urllib.error
import urllib.request
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

URLS = {
    "iris.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/iris/iris.data",
    "wdbc.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/breast-cancer-wisconsin/wdbc.data",
    "data_banknote_authentication.txt": "https://archive.ics.uci.edu/ml/machine-learning-databases/00267/data_banknote_authentication.txt",
}


def _download(name: str, dest: Path) -> bool:
    try:
        with urllib.request.urlopen(URLS[name], timeout=30) as response:
            dest.write_bytes(response.read())
        print(f"downloaded {name}")
        return True
    except (urllib.error.URLError, OSError) as exc:
        print(f"download of {name} failed ({exc}); trying offline fallback")
        return False


def _format_value(v: float) -> str:
    # UCI files carry plain decimal notation; repr keeps full precision.
    return repr(float(v))


def _regenerate_iris(dest: Path) -> bool:
    try:
        from sklearn.datasets import load_iris
    except ImportError:
        return False
    bundle = load_iris()
    names = [f"Iris-{t}" for t in bundle.target_names]
    lines = []
    for row, target in zip(bundle.data, bundle.target):
        values = ",".join(_format_value(v) for v in row)
        lines.append(f"{values},{names[target]}")
    dest.write_text("\n".join(lines) + "\n")
    print(f"regenerated {dest.name} from scikit-learn's bundled copy")
    return True


def _regenerate_wdbc(dest: Path) -> bool:
    try:
        from sklearn.datasets import load_breast_cancer
    except ImportError:
        return False
    bundle = load_breast_cancer()
    # scikit-learn encodes malignant=0, benign=1; the UCI file uses M/B letters.
    letter = {0: "M", 1: "B"}
    lines = []
    for i, (row, target) in enumerate(zip(bundle.data, bundle.target)):
        values = ",".join(_format_value(v) for v in row)
        lines.append(f"{800000 + i},{letter[int(target)]},{values}")
    dest.write_text("\n".join(lines) + "\n")
    print(
        f"regenerated {dest.name} from scikit-learn's bundled copy "
        "(synthetic sequential ids)"
    )
    return True


FALLBACKS = {"iris.data": _regenerate_iris, "wdbc.data": _regenerate_wdbc}


def main() -> int:
    DATA_DIR.mkdir(exist_ok=True)
    missing = []
    for name in URLS:
        dest = DATA_DIR / name
        if dest.exists():
            print(f"{name} already present")
            continue
        if _download(name, dest):
            continue
        fallback = FALLBACKS.get(name)
        if fallback and fallback(dest):
            continue
        missing.append(name)
    if missing:
        print(
            "could not obtain: "
            + ", ".join(missing)
            + f"\nplace the file(s) under {DATA_DIR} manually; URLs are in this script"
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
