"""Dataset loading, normalization, chi-square feature selection, splitting.

Loaders understand the three UCI benchmark file formats (wdbc.data,
iris.data, data_banknote_authentication.txt) and reject malformed rows
with their line number.  Normalization is min-max fitted on a caller-
chosen row subset (the training rows) and applied everywhere else with
clamping to [0, 1].  Feature selection ranks features by the chi-square
independence statistic of an equal-width discretization against the
class label; p-values come from a self-contained regularized incomplete
gamma implementation so the package needs no statistics dependency.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_BINS = 10
DEFAULT_TOP_K = 4

#: Feature names of the UCI distributions, in column order.
_IRIS_FEATURES = ("sepal_length", "sepal_width", "petal_length", "petal_width")
_BANKNOTE_FEATURES = ("variance", "skewness", "curtosis", "entropy")
_WDBC_BASE = (
    "radius", "texture", "perimeter", "area", "smoothness",
    "compactness", "concavity", "concave_points", "symmetry", "fractal_dimension",
)
_WDBC_FEATURES = tuple(
    f"{stat}_{base}" for stat in ("mean", "se", "worst") for base in _WDBC_BASE
)


class DataFormatError(ValueError):
    """Raised for malformed dataset files; messages carry the line number."""


@dataclass
class Dataset:
    """A labelled feature matrix with stable feature/class naming."""

    name: str
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        self.feature_names = tuple(self.feature_names)
        self.class_names = tuple(self.class_names)
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError(
                f"{self.labels.shape[0]} labels for {self.features.shape[0]} rows"
            )
        if len(self.feature_names) != self.features.shape[1]:
            raise ValueError(
                f"{len(self.feature_names)} feature names for "
                f"{self.features.shape[1]} columns"
            )
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features contain non-finite values")
        n_classes = len(self.class_names)
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= n_classes):
            raise ValueError(
                f"labels must lie in [0, {n_classes}), got range "
                f"[{self.labels.min()}, {self.labels.max()}]"
            )

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset_rows(self, rows: Sequence[int]) -> "Dataset":
        rows = np.asarray(rows, dtype=int)
        return Dataset(
            name=self.name,
            features=self.features[rows].copy(),
            labels=self.labels[rows].copy(),
            feature_names=self.feature_names,
            class_names=self.class_names,
        )

    def subset_features(self, columns: Sequence[int]) -> "Dataset":
        columns = list(columns)
        return Dataset(
            name=self.name,
            features=self.features[:, columns].copy(),
            labels=self.labels.copy(),
            feature_names=tuple(self.feature_names[c] for c in columns),
            class_names=self.class_names,
        )


def _parse_float(token: str, line_no: int, path: str) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise DataFormatError(
            f"{path}: line {line_no}: {token!r} is not a number"
        ) from exc
    if not math.isfinite(value):
        raise DataFormatError(f"{path}: line {line_no}: non-finite value {token!r}")
    return value


def _read_rows(path: str | Path) -> list[tuple[int, list[str]]]:
    rows = []
    with open(path, newline="") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # UCI files end with a blank line
            rows.append((line_no, [t.strip() for t in row]))
    if not rows:
        raise DataFormatError(f"{path}: file contains no data rows")
    return rows


def load_dataset(path: str | Path, fmt: str) -> Dataset:
    """Load a UCI-format file; ``fmt`` is one of wdbc, iris, banknote."""
    loaders = {"wdbc": _load_wdbc, "iris": _load_iris, "banknote": _load_banknote}
    if fmt not in loaders:
        raise ValueError(f"unknown dataset format {fmt!r}; expected one of {sorted(loaders)}")
    return loaders[fmt](Path(path))


def _load_iris(path: Path) -> Dataset:
    features, raw_labels = [], []
    for line_no, row in _read_rows(path):
        if len(row) != 5:
            raise DataFormatError(
                f"{path}: line {line_no}: expected 5 fields, got {len(row)}"
            )
        features.append([_parse_float(t, line_no, str(path)) for t in row[:4]])
        if not row[4]:
            raise DataFormatError(f"{path}: line {line_no}: empty class field")
        raw_labels.append(row[4])
    class_names = tuple(sorted(set(raw_labels)))
    index = {c: i for i, c in enumerate(class_names)}
    return Dataset(
        name="iris",
        features=np.array(features),
        labels=np.array([index[c] for c in raw_labels]),
        feature_names=_IRIS_FEATURES,
        class_names=class_names,
    )


def _load_wdbc(path: Path) -> Dataset:
    features, labels = [], []
    for line_no, row in _read_rows(path):
        if len(row) != 32:
            raise DataFormatError(
                f"{path}: line {line_no}: expected 32 fields (id, diagnosis, "
                f"30 features), got {len(row)}"
            )
        diagnosis = row[1]
        if diagnosis not in ("B", "M"):
            raise DataFormatError(
                f"{path}: line {line_no}: unknown diagnosis {diagnosis!r} "
                "(expected 'B' or 'M')"
            )
        labels.append(0 if diagnosis == "B" else 1)
        features.append([_parse_float(t, line_no, str(path)) for t in row[2:]])
    return Dataset(
        name="wdbc",
        features=np.array(features),
        labels=np.array(labels),
        feature_names=_WDBC_FEATURES,
        class_names=("B", "M"),
    )


def _load_banknote(path: Path) -> Dataset:
    features, labels = [], []
    for line_no, row in _read_rows(path):
        if len(row) != 5:
            raise DataFormatError(
                f"{path}: line {line_no}: expected 5 fields, got {len(row)}"
            )
        features.append([_parse_float(t, line_no, str(path)) for t in row[:4]])
        if row[4] not in ("0", "1"):
            raise DataFormatError(
                f"{path}: line {line_no}: class must be 0 or 1, got {row[4]!r}"
            )
        labels.append(int(row[4]))
    return Dataset(
        name="banknote",
        features=np.array(features),
        labels=np.array(labels),
        feature_names=_BANKNOTE_FEATURES,
        class_names=("0", "1"),
    )


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature min/max fitted on the training rows.

    ``kept_indices`` are original column indices that survived (constant
    columns are dropped); mins/maxs align with the kept columns.
    """

    kept_indices: tuple[int, ...]
    dropped_indices: tuple[int, ...]
    mins: np.ndarray
    maxs: np.ndarray

    def to_dict(self) -> dict:
        return {
            "kept_indices": list(self.kept_indices),
            "dropped_indices": list(self.dropped_indices),
            "mins": [float(v) for v in self.mins],
            "maxs": [float(v) for v in self.maxs],
        }


def min_max_normalize(
    d: Dataset, fit_rows: Sequence[int]
) -> tuple[Dataset, NormalizationParams]:
    """Map features to [0, 1] using min/max fitted on ``fit_rows`` only.

    Rows outside the fit set are transformed with the same parameters and
    clamped to [0, 1].  Features constant on the fit rows are dropped with
    a warning.
    """
    fit_rows = np.asarray(fit_rows, dtype=int)
    if fit_rows.size == 0:
        raise ValueError("cannot fit normalization on an empty row set")
    fit = d.features[fit_rows]
    mins = fit.min(axis=0)
    maxs = fit.max(axis=0)
    kept = np.flatnonzero(maxs > mins)
    dropped = np.flatnonzero(maxs <= mins)
    if dropped.size:
        names = [d.feature_names[i] for i in dropped]
        warnings.warn(
            f"dropping {dropped.size} constant feature(s): {names}", stacklevel=2
        )
    if kept.size == 0:
        raise ValueError("all features are constant on the fit rows")
    scaled = (d.features[:, kept] - mins[kept]) / (maxs[kept] - mins[kept])
    scaled = np.clip(scaled, 0.0, 1.0)
    out = Dataset(
        name=d.name,
        features=scaled,
        labels=d.labels.copy(),
        feature_names=tuple(d.feature_names[i] for i in kept),
        class_names=d.class_names,
    )
    params = NormalizationParams(
        kept_indices=tuple(int(i) for i in kept),
        dropped_indices=tuple(int(i) for i in dropped),
        mins=mins[kept].copy(),
        maxs=maxs[kept].copy(),
    )
    return out, params


def denormalize(features: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """Invert min_max_normalize on already-kept columns (no clamping undone)."""
    features = np.asarray(features, dtype=float)
    return features * (params.maxs - params.mins) + params.mins


# --- chi-square machinery -------------------------------------------------

def _regularized_gamma_p_series(s: float, x: float) -> float:
    # Lower regularized gamma by power series; converges fast for x < s + 1.
    term = 1.0 / s
    total = term
    k = s
    for _ in range(10_000):
        k += 1.0
        term *= x / k
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + s * math.log(x) - math.lgamma(s))


def _regularized_gamma_q_contfrac(s: float, x: float) -> float:
    # Upper regularized gamma by Lentz's continued fraction; for x >= s + 1.
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return math.exp(-x + s * math.log(x) - math.lgamma(s)) * h


def regularized_gamma_q(s: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(s, x) for s > 0, x >= 0."""
    if s <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {s}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x}")
    if x == 0.0:
        return 1.0
    if x < s + 1.0:
        return 1.0 - _regularized_gamma_p_series(s, x)
    return _regularized_gamma_q_contfrac(s, x)


def chi_square_sf(statistic: float, dof: int) -> float:
    """P(X >= statistic) for a chi-square variable with ``dof`` degrees."""
    if dof < 0:
        raise ValueError(f"degrees of freedom must be non-negative, got {dof}")
    if statistic < 0.0:
        raise ValueError(f"chi-square statistic must be non-negative, got {statistic}")
    if dof == 0:
        # Degenerate distribution at 0: any positive statistic is impossible
        # under independence with no free cells; report no significance.
        return 1.0
    return regularized_gamma_q(dof / 2.0, statistic / 2.0)


@dataclass(frozen=True)
class SelectionResult:
    """Chi-square ranking of features against the class label.

    ``kept_indices`` is sorted by descending statistic.  ``effective_bins``
    records, per feature, how many discretization bins were actually
    occupied after empty bins were merged away.
    """

    kept_indices: tuple[int, ...]
    chi2_scores: np.ndarray
    p_values: np.ndarray
    effective_bins: tuple[int, ...]
    policy: str

    def summary_lines(self, feature_names: Sequence[str]) -> list[str]:
        kept = set(self.kept_indices)
        order = sorted(
            range(len(self.chi2_scores)), key=lambda i: (-self.chi2_scores[i], i)
        )
        lines = [f"policy: {self.policy}"]
        for rank, i in enumerate(order, start=1):
            mark = "kept" if i in kept else "dropped"
            lines.append(
                f"{rank:2d}. feature {i:2d} ({feature_names[i]}): "
                f"chi2={self.chi2_scores[i]:.4f} p={self.p_values[i]:.3e} "
                f"bins={self.effective_bins[i]} [{mark}]"
            )
        return lines


def parse_selection_policy(policy: str) -> tuple[str, float]:
    """Parse 'topk=K' or 'alpha=F' into (kind, value)."""
    try:
        kind, raw = policy.split("=", 1)
    except ValueError as exc:
        raise ValueError(
            f"policy must look like 'topk=4' or 'alpha=0.05', got {policy!r}"
        ) from exc
    kind = kind.strip().lower()
    if kind == "topk":
        k = int(raw)
        if k < 1:
            raise ValueError(f"topk must be at least 1, got {k}")
        return "topk", float(k)
    if kind == "alpha":
        alpha = float(raw)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        return "alpha", alpha
    raise ValueError(f"unknown selection policy kind {kind!r}")


def _feature_chi2(
    column: np.ndarray, labels: np.ndarray, n_classes: int, bins: int
) -> tuple[float, float, int]:
    """Chi-square statistic, p-value, and occupied bin count for one feature."""
    lo, hi = float(column.min()), float(column.max())
    if hi <= lo:
        return 0.0, 1.0, 1  # constant feature carries no information
    width = (hi - lo) / bins
    idx = np.minimum(((column - lo) / width).astype(int), bins - 1)
    table = np.zeros((bins, n_classes), dtype=float)
    np.add.at(table, (idx, labels), 1.0)
    # Empty bins contribute nothing; merging them into a neighbour is the
    # same as removing their all-zero row, but it changes the dof.
    table = table[table.sum(axis=1) > 0]
    table = table[:, table.sum(axis=0) > 0]
    rows, cols = table.shape
    total = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / total
    statistic = float(((table - expected) ** 2 / expected).sum())
    dof = (rows - 1) * (cols - 1)
    return statistic, chi_square_sf(statistic, dof), rows


def chi_square_select(
    d: Dataset, bins: int = DEFAULT_BINS, policy: str = f"topk={DEFAULT_TOP_K}"
) -> SelectionResult:
    """Score every feature against the label and keep a subset per policy.

    Each feature is discretized into ``bins`` equal-width bins over its
    observed range; the statistic is the usual sum of (O-E)^2/E over the
    bin-by-class contingency table with dof (bins-1)(classes-1), counting
    only occupied bins.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    if d.n_instances == 0:
        raise ValueError("cannot select features on an empty dataset")
    kind, value = parse_selection_policy(policy)
    scores = np.zeros(d.n_features)
    p_values = np.ones(d.n_features)
    effective = []
    for f in range(d.n_features):
        scores[f], p_values[f], occupied = _feature_chi2(
            d.features[:, f], d.labels, d.n_classes, bins
        )
        effective.append(occupied)
    order = sorted(range(d.n_features), key=lambda i: (-scores[i], i))
    if kind == "topk":
        kept = tuple(order[: min(int(value), d.n_features)])
    else:
        kept = tuple(i for i in order if p_values[i] < value)
    return SelectionResult(
        kept_indices=kept,
        chi2_scores=scores,
        p_values=p_values,
        effective_bins=tuple(effective),
        policy=policy,
    )


# --- splitting and serialization -------------------------------------------

def stratified_indices(
    labels: np.ndarray, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class proportional train/test row indices; deterministic per seed."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test fraction must lie in (0, 1), got {test_fraction}")
    labels = np.asarray(labels, dtype=int)
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for cls in np.unique(labels):
        rows = np.flatnonzero(labels == cls)
        if rows.size < 2:
            raise ValueError(
                f"class {cls} has only {rows.size} instance(s); cannot split"
            )
        n_test = min(int(round(test_fraction * rows.size)), rows.size - 1)
        shuffled = rng.permutation(rows)
        test_idx.extend(shuffled[:n_test].tolist())
        train_idx.extend(shuffled[n_test:].tolist())
    return np.array(sorted(train_idx)), np.array(sorted(test_idx))


def stratified_split(
    d: Dataset, test_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Split into disjoint train/test datasets preserving class proportions."""
    train_idx, test_idx = stratified_indices(d.labels, test_fraction, seed)
    return d.subset_rows(train_idx), d.subset_rows(test_idx)


def save_dataset(
    d: Dataset, csv_path: str | Path, sidecar: dict | None = None
) -> None:
    """Write features+labels as CSV plus a JSON sidecar with the metadata.

    Floats are written with repr so a reload reproduces the matrix exactly.
    The sidecar (csv_path with a .json suffix) stores names and any extra
    provenance the caller supplies (normalization params, split seed, ...).
    """
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.feature_names) + ["label"])
        for row, label in zip(d.features, d.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
    meta = {
        "name": d.name,
        "feature_names": list(d.feature_names),
        "class_names": list(d.class_names),
    }
    if sidecar:
        meta.update(sidecar)
    with open(csv_path.with_suffix(".json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_saved(csv_path: str | Path) -> Dataset:
    """Reload a dataset written by save_dataset (CSV + JSON sidecar)."""
    csv_path = Path(csv_path)
    with open(csv_path.with_suffix(".json")) as fh:
        meta = json.load(fh)
    features, labels = [], []
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_features = len(header) - 1
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_features + 1:
                raise DataFormatError(
                    f"{csv_path}: line {line_no}: expected {n_features + 1} fields"
                )
            features.append([float(v) for v in row[:n_features]])
            labels.append(int(row[n_features]))
    return Dataset(
        name=meta["name"],
        features=np.array(features).reshape(len(labels), n_features),
        labels=np.array(labels, dtype=int),
        feature_names=tuple(meta["feature_names"]),
        class_names=tuple(meta["class_names"]),
    )
