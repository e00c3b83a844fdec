"""Financial-indicator records, labelled datasets, CSV I/O and min-max scaling.

The four measured attributes are weighted sums of fifteen raw indicators,
each group normalised by 25 (the group weights always sum to 25):

=====================  ==================  =============
attribute              indicators          weights
=====================  ==================  =============
financial structure    X1..X3              7, 6, 12
earning ability        X4..X7              8, 8, 5, 4
operating ability      X8..X12             7, 6, 5, 4, 3
debt paying ability    X13..X15            8, 7, 10
=====================  ==================  =============

Labels are +1 for a distressed ("special treatment") company and -1 otherwise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

ATTRIBUTE_NAMES = (
    "financial_structure",
    "earning_ability",
    "operating_ability",
    "debt_paying_ability",
)

# (first indicator index, weights) per attribute; indices are 0-based into X1..X15
INDICATOR_GROUPS = (
    (0, (7, 6, 12)),
    (3, (8, 8, 5, 4)),
    (7, (7, 6, 5, 4, 3)),
    (12, (8, 7, 10)),
)
GROUP_TOTAL = 25

LABELS = (1, -1)


class DatasetError(ValueError):
    """Raised for malformed or inconsistent data."""


def _check_label(label: int) -> int:
    if label not in LABELS:
        raise DatasetError(f"label must be +1 or -1, got {label!r}")
    return int(label)


@dataclass(frozen=True)
class RawIndicatorRecord:
    """Fifteen raw financial ratios X1..X15 plus a +/-1 label."""

    indicators: tuple[float, ...]
    label: int

    def __post_init__(self):
        values = tuple(float(v) for v in self.indicators)
        if len(values) != 15:
            raise DatasetError(f"expected 15 indicator values, got {len(values)}")
        object.__setattr__(self, "indicators", values)
        object.__setattr__(self, "label", _check_label(self.label))


@dataclass(frozen=True)
class Sample:
    features: tuple[float, ...]
    label: int

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(float(v) for v in self.features))
        object.__setattr__(self, "label", _check_label(self.label))


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of samples sharing one feature dimension."""

    samples: tuple[Sample, ...]
    feature_names: tuple[str, ...]

    def __post_init__(self):
        samples = tuple(self.samples)
        names = tuple(self.feature_names)
        if not samples:
            raise DatasetError("empty dataset")
        for i, s in enumerate(samples):
            if len(s.features) != len(names):
                raise DatasetError(
                    f"sample {i} has {len(s.features)} features, expected {len(names)}"
                )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "feature_names", names)

    @classmethod
    def from_arrays(cls, X, y, feature_names: Sequence[str] | None = None) -> "Dataset":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DatasetError("feature matrix must be 2-D")
        if feature_names is None:
            feature_names = [f"f{i + 1}" for i in range(X.shape[1])]
        samples = tuple(Sample(tuple(row), int(lab)) for row, lab in zip(X, y))
        if len(samples) != X.shape[0]:
            raise DatasetError("feature matrix and label vector differ in length")
        return cls(samples, tuple(feature_names))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def X(self) -> np.ndarray:
        return np.array([s.features for s in self.samples], dtype=float)

    @property
    def y(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(tuple(self.samples[i] for i in indices), self.feature_names)


def aggregate_indicators(record: RawIndicatorRecord) -> Sample:
    """Collapse X1..X15 into the four weighted attribute scores."""
    x = record.indicators
    features = []
    for start, weights in INDICATOR_GROUPS:
        total = sum(w * x[start + k] for k, w in enumerate(weights))
        features.append(total / GROUP_TOTAL)
    return Sample(tuple(features), record.label)


def aggregate_dataset(records: Iterable[RawIndicatorRecord]) -> Dataset:
    return Dataset(tuple(aggregate_indicators(r) for r in records), ATTRIBUTE_NAMES)


# ---------------------------------------------------------------------------
# CSV interchange: header f1,...,fn,label
# ---------------------------------------------------------------------------


def load_csv(path) -> Dataset:
    """Read a dataset whose last column is ``label`` (values 1 or -1).

    Row numbers in error messages are 1-based file lines (the header is line 1).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty dataset") from None
        if len(header) < 2 or header[-1] != "label":
            raise DatasetError(f"{path}: header must end with a 'label' column")
        names = header[:-1]
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: row {lineno} has {len(row)} columns, expected {len(header)}"
                )
            try:
                features = [float(cell) for cell in row[:-1]]
            except ValueError as exc:
                raise DatasetError(f"{path}: row {lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in features):
                raise DatasetError(f"{path}: row {lineno}: non-finite feature value")
            label_text = row[-1].strip()
            if label_text not in ("1", "-1", "+1"):
                raise DatasetError(
                    f"{path}: row {lineno}: label must be 1 or -1, got {label_text!r}"
                )
            samples.append(Sample(tuple(features), int(label_text)))
    if not samples:
        raise DatasetError(f"{path}: empty dataset")
    return Dataset(tuple(samples), tuple(names))


def save_csv(ds: Dataset, path) -> None:
    # repr() is the shortest string that round-trips the double exactly
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*ds.feature_names, "label"])
        for s in ds.samples:
            writer.writerow([repr(v) for v in s.features] + [str(s.label)])


# ---------------------------------------------------------------------------
# Min-max scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalerParams:
    """Per-feature training minima/maxima and the output interval.

    ``feature_range`` defaults to [0, 1]. The SVM/MLP pipeline uses [-1, 1],
    the range LIBSVM's ``svm-scale`` produces by default.
    """

    minimum: tuple[float, ...]
    maximum: tuple[float, ...]
    feature_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        lo = tuple(float(v) for v in self.minimum)
        hi = tuple(float(v) for v in self.maximum)
        if len(lo) != len(hi):
            raise DatasetError("scaler minimum and maximum differ in length")
        if any(a > b for a, b in zip(lo, hi)):
            raise DatasetError("scaler minimum exceeds maximum")
        a, b = (float(v) for v in self.feature_range)
        if not a < b:
            raise DatasetError(f"invalid feature range {self.feature_range!r}")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)
        object.__setattr__(self, "feature_range", (a, b))

    @property
    def n_features(self) -> int:
        return len(self.minimum)

    def transform(self, X) -> np.ndarray:
        """Scale a feature matrix (or a single vector) row-wise."""
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.n_features:
            raise DatasetError(
                f"dimension mismatch: scaler has {self.n_features} features, "
                f"input has {X.shape[-1]}"
            )
        lo = np.array(self.minimum)
        span = np.array(self.maximum) - lo
        a, b = self.feature_range
        constant = span == 0
        unit = (X - lo) / np.where(constant, 1.0, span)
        # constant features map to the lower end of the range
        unit = np.where(constant, 0.0, unit)
        return a + (b - a) * unit

    def to_dict(self) -> dict:
        return {
            "minimum": list(self.minimum),
            "maximum": list(self.maximum),
            "feature_range": list(self.feature_range),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerParams":
        return cls(tuple(d["minimum"]), tuple(d["maximum"]), tuple(d["feature_range"]))


def fit_scaler(ds: Dataset, feature_range=(0.0, 1.0)) -> ScalerParams:
    X = ds.X
    return ScalerParams(tuple(X.min(axis=0)), tuple(X.max(axis=0)), tuple(feature_range))


def apply_scaler(params: ScalerParams, sample: Sample) -> Sample:
    return Sample(tuple(params.transform(sample.features)), sample.label)


def scale_dataset(params: ScalerParams, ds: Dataset) -> Dataset:
    return Dataset.from_arrays(params.transform(ds.X), ds.y, ds.feature_names)


# ---------------------------------------------------------------------------
# Bundled experiment data
# ---------------------------------------------------------------------------

# Graded attributes of the 20 training companies; last column is the label.
_TRAINING_ROWS = (
    (0.23, 0.20, 0.09, 0.20, -1),
    (0.18, 0.18, 0.10, 0.21, -1),
    (0.16, 0.18, 0.08, 0.17, -1),
    (0.19, 0.11, 0.12, 0.18, -1),
    (0.20, 0.22, 0.11, 0.19, -1),
    (0.24, 0.20, 0.09, 0.20, -1),
    (0.23, 0.14, 0.06, 0.20, -1),
    (0.20, 0.08, 0.07, 0.10, 1),
    (0.18, 0.09, 0.05, 0.18, 1),
    (0.19, 0.12, 0.03, 0.12, 1),
    (0.22, 0.13, 0.04, 0.15, -1),
    (0.16, 0.10, 0.07, 0.14, 1),
    (0.19, 0.09, 0.11, 0.12, 1),
    (0.15, 0.18, 0.16, 0.10, -1),
    (0.18, 0.20, 0.20, 0.08, -1),
    (0.12, 0.17, 0.18, 0.13, -1),
    (0.21, 0.18, 0.10, 0.12, -1),
    (0.19, 0.18, 0.12, 0.09, -1),
    (0.22, 0.19, 0.09, 0.14, -1),
    (0.20, 0.15, 0.15, 0.09, -1),
)

# The 25 hold-out companies. The published "correction" column is not used.
_TESTING_ROWS = (
    (0.22, 0.20, 0.10, 0.20, -1),
    (0.20, 0.18, 0.10, 0.21, -1),
    (0.16, 0.20, 0.08, 0.17, -1),
    (0.19, 0.15, 0.12, 0.18, -1),
    (0.20, 0.22, 0.20, 0.19, -1),
    (0.22, 0.20, 0.09, 0.20, -1),
    (0.23, 0.18, 0.06, 0.20, -1),
    (0.20, 0.08, 0.09, 0.10, 1),
    (0.18, 0.12, 0.05, 0.11, 1),
    (0.19, 0.15, 0.03, 0.12, 1),
    (0.22, 0.13, 0.08, 0.15, -1),
    (0.18, 0.10, 0.07, 0.14, 1),
    (0.19, 0.09, 0.12, 0.12, 1),
    (0.16, 0.18, 0.16, 0.10, -1),
    (0.18, 0.22, 0.20, 0.08, -1),
    (0.12, 0.17, 0.18, 0.15, -1),
    (0.21, 0.18, 0.12, 0.12, 1),
    (0.19, 0.20, 0.12, 0.10, -1),
    (0.22, 0.15, 0.09, 0.14, -1),
    (0.21, 0.15, 0.18, 0.10, -1),
    (0.20, 0.13, 0.09, 0.15, -1),
    (0.18, 0.15, 0.07, 0.18, 1),
    (0.16, 0.10, 0.12, 0.14, 1),
    (0.19, 0.18, 0.16, 0.18, -1),
    (0.16, 0.20, 0.20, 0.09, -1),
)


def _from_rows(rows) -> Dataset:
    return Dataset(tuple(Sample(r[:4], r[4]) for r in rows), ATTRIBUTE_NAMES)


def bundled_training_set() -> Dataset:
    """The 20 graded training companies (5 distressed, 15 healthy)."""
    return _from_rows(_TRAINING_ROWS)


def bundled_testing_set() -> Dataset:
    """The 25 graded hold-out companies."""
    return _from_rows(_TESTING_ROWS)
