"""Data-centric explanations: descriptive insights, histograms, quality.

Everything here is computed from the training data alone. Quartiles
use linear interpolation and outliers are judged against Tukey fences
(Q1 - 1.5 IQR, Q3 + 1.5 IQR), so every number is reproducible by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dataset import Dataset
from .errors import EmptyDataset, SingleClassData

N_BINS = 10
SIMILAR_SMD_THRESHOLD = 0.1


# -- key insights ---------------------------------------------------------------


@dataclass(frozen=True)
class KeyInsight:
    """Class-conditional contrast for one feature.

    ``smd`` is the standardized mean difference (positive-class mean
    minus negative-class mean over the pooled standard deviation);
    ``math.inf`` marks a degenerate pooled deviation with differing
    means. ``direction`` is ``similar`` iff |smd| < 0.1.
    """

    feature: str
    class_means: tuple[float | None, float | None]
    smd: float
    direction: str
    unit: str | None

    def to_dict(self, labels: tuple[str, str]) -> dict:
        return {
            "feature": self.feature,
            "class_means": {
                labels[0]: self.class_means[0],
                labels[1]: self.class_means[1],
            },
            "smd": None if math.isinf(self.smd) else self.smd,
            "direction": self.direction,
            "unit": self.unit,
        }


def key_insights(ds: Dataset) -> list[KeyInsight]:
    """Per numeric feature, the class contrast sorted by |smd| descending."""
    c0, c1 = ds.class_counts()
    if c0 == 0 or c1 == 0:
        raise SingleClassData("key insights need both classes present")

    out = []
    for i, spec in enumerate(ds.schema):
        if spec.kind != "numeric":
            continue
        col = ds.matrix[:, i]
        neg = col[(ds.labels == 0) & ~np.isnan(col)]
        pos = col[(ds.labels == 1) & ~np.isnan(col)]
        mean_neg = float(neg.mean()) if neg.size else None
        mean_pos = float(pos.mean()) if pos.size else None
        if not neg.size or not pos.size:
            smd, direction = 0.0, "similar"
        else:
            smd = _standardized_difference(neg, pos)
            if abs(smd) < SIMILAR_SMD_THRESHOLD:
                direction = "similar"
            elif smd > 0:
                direction = "higher_in_positive"
            else:
                direction = "higher_in_negative"
        out.append(
            KeyInsight(
                feature=spec.name,
                class_means=(mean_neg, mean_pos),
                smd=smd,
                direction=direction,
                unit=spec.unit,
            )
        )
    schema_pos = {s.name: i for i, s in enumerate(ds.schema)}
    out.sort(key=lambda k: (-abs(k.smd), schema_pos[k.feature]))
    return out


def _standardized_difference(neg: np.ndarray, pos: np.ndarray) -> float:
    n0, n1 = neg.size, pos.size
    var0 = float(neg.var(ddof=1)) if n0 > 1 else 0.0
    var1 = float(pos.var(ddof=1)) if n1 > 1 else 0.0
    dof = n0 + n1 - 2
    pooled = math.sqrt(((n0 - 1) * var0 + (n1 - 1) * var1) / dof) if dof > 0 else 0.0
    diff = float(pos.mean() - neg.mean())
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0
        return math.inf if diff > 0 else -math.inf
    return diff / pooled


# -- density distributions --------------------------------------------------------


@dataclass(frozen=True)
class DensityDistribution:
    """Per-class histogram over ten equal-width bins (one degenerate bin
    when the feature is constant)."""

    feature: str
    bin_edges: tuple[float, ...]
    counts_per_class: tuple[tuple[int, ...], tuple[int, ...]]
    missing_count: int

    def to_dict(self, labels: tuple[str, str]) -> dict:
        return {
            "feature": self.feature,
            "bin_edges": list(self.bin_edges),
            "counts_per_class": {
                labels[0]: list(self.counts_per_class[0]),
                labels[1]: list(self.counts_per_class[1]),
            },
            "missing_count": self.missing_count,
        }


def density_distributions(ds: Dataset) -> list[DensityDistribution]:
    """Histogram every feature; the right-most bin includes the maximum."""
    if ds.n_rows == 0:
        raise EmptyDataset("cannot profile an empty dataset")
    out = []
    for i, spec in enumerate(ds.schema):
        col = ds.matrix[:, i]
        missing = np.isnan(col)
        missing_count = int(missing.sum())
        present = ~missing
        values = col[present]
        if values.size == 0:
            out.append(
                DensityDistribution(spec.name, (0.0, 0.0), ((0,), (0,)), missing_count)
            )
            continue
        lo = float(values.min())
        hi = float(values.max())
        if lo == hi:
            counts = tuple(
                (int(np.sum(present & (ds.labels == c))),) for c in (0, 1)
            )
            out.append(
                DensityDistribution(spec.name, (lo, hi), counts, missing_count)
            )
            continue
        edges = [lo + (hi - lo) * k / N_BINS for k in range(N_BINS + 1)]
        edges[-1] = hi
        idx = np.clip(
            np.floor((values - lo) / (hi - lo) * N_BINS).astype(np.int64), 0, N_BINS - 1
        )
        counts = []
        for c in (0, 1):
            of_class = (ds.labels[present] == c)
            counts.append(tuple(
                int(v) for v in np.bincount(idx[of_class], minlength=N_BINS)
            ))
        out.append(
            DensityDistribution(spec.name, tuple(edges), tuple(counts), missing_count)
        )
    return out


# -- data quality ------------------------------------------------------------------


def tukey_fences(values: np.ndarray) -> tuple[float, float]:
    """Outlier fences with linearly interpolated quartiles."""
    q1, q3 = np.percentile(values, [25.0, 75.0])
    iqr = q3 - q1
    return float(q1 - 1.5 * iqr), float(q3 + 1.5 * iqr)


@dataclass(frozen=True)
class FeatureQuality:
    missing_count: int
    missing_fraction: float
    non_missing_count: int
    outlier_count: int
    outlier_fraction: float

    def to_dict(self) -> dict:
        return {
            "missing_count": self.missing_count,
            "missing_fraction": self.missing_fraction,
            "non_missing_count": self.non_missing_count,
            "outlier_count": self.outlier_count,
            "outlier_fraction": self.outlier_fraction,
        }


@dataclass(frozen=True)
class DataQualityReport:
    """Four [0,1] sub-scores and their arithmetic mean.

    Raw counts ship alongside so every sub-score can be recomputed from
    the report itself.
    """

    completeness: float
    outlier_cleanliness: float
    uniqueness: float
    class_balance: float
    composite: float
    per_feature: Mapping[str, FeatureQuality]
    row_count: int
    duplicate_count: int
    class_counts: tuple[int, int]

    def to_dict(self, labels: tuple[str, str]) -> dict:
        return {
            "completeness": self.completeness,
            "outlier_cleanliness": self.outlier_cleanliness,
            "uniqueness": self.uniqueness,
            "class_balance": self.class_balance,
            "composite": self.composite,
            "per_feature": {
                name: fq.to_dict() for name, fq in self.per_feature.items()
            },
            "row_count": self.row_count,
            "duplicate_count": self.duplicate_count,
            "class_counts": {
                labels[0]: self.class_counts[0],
                labels[1]: self.class_counts[1],
            },
        }


def duplicate_row_indices(ds: Dataset) -> np.ndarray:
    """Indices of rows that exactly repeat an earlier row (features and label)."""
    seen: dict[tuple, int] = {}
    dups = []
    for i in range(ds.n_rows):
        key = _row_key(ds.matrix[i], int(ds.labels[i]))
        if key in seen:
            dups.append(i)
        else:
            seen[key] = i
    return np.array(dups, dtype=np.int64)


def _row_key(row: np.ndarray, label: int) -> tuple:
    return tuple(None if math.isnan(v) else float(v) for v in row) + (label,)


def data_quality(ds: Dataset) -> DataQualityReport:
    """Profile completeness, outliers, duplicates, and class balance."""
    if ds.n_rows == 0:
        raise EmptyDataset("cannot profile an empty dataset")
    n_rows = ds.n_rows
    n_feat = ds.n_features
    per_feature: dict[str, FeatureQuality] = {}
    total_missing = 0
    total_outliers = 0
    total_present = 0
    for i, spec in enumerate(ds.schema):
        col = ds.matrix[:, i]
        missing = int(np.isnan(col).sum())
        values = col[~np.isnan(col)]
        outliers = 0
        if values.size:
            lo, hi = tukey_fences(values)
            outliers = int(np.sum((values < lo) | (values > hi)))
        per_feature[spec.name] = FeatureQuality(
            missing_count=missing,
            missing_fraction=missing / n_rows,
            non_missing_count=int(values.size),
            outlier_count=outliers,
            outlier_fraction=outliers / values.size if values.size else 0.0,
        )
        total_missing += missing
        total_outliers += outliers
        total_present += int(values.size)

    completeness = 1.0 - total_missing / (n_rows * n_feat)
    outlier_cleanliness = (
        1.0 - total_outliers / total_present if total_present else 1.0
    )
    duplicate_count = int(duplicate_row_indices(ds).size)
    uniqueness = 1.0 - duplicate_count / n_rows
    c0, c1 = ds.class_counts()
    class_balance = min(c0, c1) / max(c0, c1) if max(c0, c1) else 0.0
    composite = (completeness + outlier_cleanliness + uniqueness + class_balance) / 4.0
    return DataQualityReport(
        completeness=completeness,
        outlier_cleanliness=outlier_cleanliness,
        uniqueness=uniqueness,
        class_balance=class_balance,
        composite=composite,
        per_feature=per_feature,
        row_count=n_rows,
        duplicate_count=duplicate_count,
        class_counts=(c0, c1),
    )
