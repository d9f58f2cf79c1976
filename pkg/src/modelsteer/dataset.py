"""Typed tabular dataset: ingestion, schema annotation, row filtering.

A :class:`Dataset` is immutable after construction. Cells are float64
with NaN marking missing values; disguised missing sentinels (a literal
0 in columns flagged ``zero_is_missing``) are converted to missing at
ingestion time. Every construction computes a content-addressed
``snapshot_id`` over the canonical serialization, so identical content
always carries the identical id.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import canonical
from .errors import (
    EmptyFile,
    EmptySelection,
    InvertedRange,
    MissingColumn,
    UnknownFeature,
    UnknownLabel,
    UnparseableCell,
)

FEATURE_KINDS = ("numeric", "binary", "categorical")


@dataclass(frozen=True)
class FeatureSpec:
    """Schema annotation for one predictor variable.

    ``plausible_min``/``plausible_max`` are domain-valid bounds (not
    observed bounds) and ``actionable`` marks factors a person can act
    on; both are domain knowledge carried as a sidecar, never inferred.
    """

    name: str
    kind: str = "numeric"
    unit: str | None = None
    actionable: bool = False
    plausible_min: float | None = None
    plausible_max: float | None = None
    zero_is_missing: bool = False
    display_label: str = ""

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if (
            self.plausible_min is not None
            and self.plausible_max is not None
            and self.plausible_min > self.plausible_max
        ):
            raise ValueError(f"feature {self.name!r}: plausible_min > plausible_max")
        if not self.display_label:
            object.__setattr__(self, "display_label", self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "unit": self.unit,
            "actionable": self.actionable,
            "plausible_min": self.plausible_min,
            "plausible_max": self.plausible_max,
            "zero_is_missing": self.zero_is_missing,
            "display_label": self.display_label,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "FeatureSpec":
        return cls(
            name=str(doc["name"]),
            kind=str(doc.get("kind", "numeric")),
            unit=doc.get("unit"),
            actionable=bool(doc.get("actionable", False)),
            plausible_min=_opt_float(doc.get("plausible_min")),
            plausible_max=_opt_float(doc.get("plausible_max")),
            zero_is_missing=bool(doc.get("zero_is_missing", False)),
            display_label=str(doc.get("display_label") or doc["name"]),
        )


def _opt_float(v: Any) -> float | None:
    return None if v is None else float(v)


@dataclass(frozen=True)
class Instance:
    """One row: a value slot per schema feature (None = missing) plus a label index."""

    values: tuple[float | None, ...]
    label: int


class Dataset:
    """Immutable tabular dataset with a binary target.

    Construction validates the schema (unique names, target not among
    features, at least one row) and freezes the cell matrix. All row
    and column operations return new snapshots.
    """

    __slots__ = ("schema", "target_name", "target_labels", "_X", "_y", "snapshot_id")

    def __init__(
        self,
        schema: Sequence[FeatureSpec],
        target_name: str,
        target_labels: Sequence[str],
        X: np.ndarray,
        y: np.ndarray,
    ):
        names = [s.name for s in schema]
        if len(set(names)) != len(names):
            raise ValueError("duplicate feature names in schema")
        if target_name in names:
            raise ValueError("target name collides with a feature name")
        if len(target_labels) != 2:
            raise ValueError("binary target required: exactly two labels")
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] != len(schema):
            raise ValueError("cell matrix shape does not match schema")
        if y.shape != (X.shape[0],):
            raise ValueError("label vector length does not match rows")
        X = X.copy()
        y = y.copy()
        X.flags.writeable = False
        y.flags.writeable = False
        self.schema = tuple(schema)
        self.target_name = target_name
        self.target_labels = tuple(str(t) for t in target_labels)
        self._X = X
        self._y = y
        self.snapshot_id = canonical.digest_of(self.to_payload())

    # -- views ------------------------------------------------------------

    @property
    def matrix(self) -> np.ndarray:
        """Read-only (rows, features) float64 matrix; NaN marks missing."""
        return self._X

    @property
    def labels(self) -> np.ndarray:
        """Read-only label index vector."""
        return self._y

    @property
    def n_rows(self) -> int:
        return self._X.shape[0]

    @property
    def n_features(self) -> int:
        return len(self.schema)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.schema)

    def feature_index(self, name: str) -> int:
        for i, s in enumerate(self.schema):
            if s.name == name:
                return i
        raise UnknownFeature(f"unknown feature {name!r}")

    def spec(self, name: str) -> FeatureSpec:
        return self.schema[self.feature_index(name)]

    def class_counts(self) -> tuple[int, int]:
        return (int(np.sum(self._y == 0)), int(np.sum(self._y == 1)))

    def instances(self) -> Iterator[Instance]:
        for i in range(self.n_rows):
            row = self._X[i]
            values = tuple(None if math.isnan(v) else float(v) for v in row)
            yield Instance(values=values, label=int(self._y[i]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Dataset) and other.snapshot_id == self.snapshot_id

    def __hash__(self) -> int:
        return hash(self.snapshot_id)

    # -- serialization ------------------------------------------------------

    def to_payload(self) -> dict:
        """Canonical dict form; the snapshot_id is the digest of its bytes."""
        rows = []
        for i in range(self._X.shape[0]):
            values = [
                None if math.isnan(v) else float(v) for v in self._X[i]
            ]
            rows.append({"values": values, "label": int(self._y[i])})
        return {
            "v": 1,
            "kind": "dataset",
            "schema": [s.to_dict() for s in self.schema],
            "target": {"name": self.target_name, "labels": list(self.target_labels)},
            "rows": rows,
        }

    @classmethod
    def from_payload(cls, doc: Mapping[str, Any]) -> "Dataset":
        schema = [FeatureSpec.from_dict(d) for d in doc["schema"]]
        rows = doc["rows"]
        X = np.full((len(rows), len(schema)), np.nan)
        y = np.zeros(len(rows), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, v in enumerate(row["values"]):
                if v is not None:
                    X[i, j] = float(v)
            y[i] = int(row["label"])
        return cls(schema, doc["target"]["name"], doc["target"]["labels"], X, y)

    # -- derived snapshots ---------------------------------------------------

    def subset_rows(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.schema, self.target_name, self.target_labels,
            self._X[idx], self._y[idx],
        )

    def replace_matrix(self, X: np.ndarray, y: np.ndarray | None = None) -> "Dataset":
        return Dataset(
            self.schema, self.target_name, self.target_labels,
            X, self._y if y is None else y,
        )


# -- schema documents ---------------------------------------------------------


def parse_schema_doc(doc: Mapping[str, Any]) -> tuple[list[FeatureSpec], str, list[str]]:
    """Parse a schema document into (features, target_name, target_labels).

    The document is the sidecar JSON object shipped next to each CSV:
    ``{"features": [...], "target": {"name": ..., "labels": [...]}}``.
    """
    try:
        features = [FeatureSpec.from_dict(f) for f in doc["features"]]
        target = doc["target"]
        target_name = str(target["name"])
        labels = [str(v) for v in target["labels"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed schema document: {exc}") from exc
    if len(labels) != 2:
        raise ValueError("schema document must declare exactly two target labels")
    return features, target_name, labels


# -- operations ----------------------------------------------------------------


def ingest_csv(csv_bytes: bytes, schema_doc: Mapping[str, Any]) -> Dataset:
    """Parse CSV bytes against a schema document into a Dataset.

    Cells equal to the missing sentinel (empty string, or a parsed 0
    in a ``zero_is_missing`` column) become missing. Rows keep file
    order. Columns not named by the schema are ignored.
    """
    features, target_name, target_labels = parse_schema_doc(schema_doc)

    text = csv_bytes.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyFile("CSV has no header row") from None
    header = [h.strip() for h in header]
    col_of: dict[str, int] = {}
    for name in [f.name for f in features] + [target_name]:
        if name not in header:
            raise MissingColumn(f"column {name!r} not present in CSV", name=name)
        col_of[name] = header.index(name)

    label_index = {label: i for i, label in enumerate(target_labels)}
    values_rows: list[list[float]] = []
    labels: list[int] = []
    for row_num, record in enumerate(reader):
        if not record or all(cell.strip() == "" for cell in record):
            continue
        raw_label = record[col_of[target_name]].strip()
        if raw_label not in label_index:
            raise UnknownLabel(row_num, raw_label)
        labels.append(label_index[raw_label])
        row_values: list[float] = []
        for spec in features:
            cell = record[col_of[spec.name]].strip()
            if cell == "":
                row_values.append(np.nan)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise UnparseableCell(row_num, spec.name) from None
            if spec.zero_is_missing and value == 0.0:
                value = np.nan
            row_values.append(value)
        values_rows.append(row_values)

    if not values_rows:
        raise EmptyFile("CSV has a header but no data rows")
    X = np.array(values_rows, dtype=np.float64)
    y = np.array(labels, dtype=np.int64)
    return Dataset(features, target_name, target_labels, X, y)


def filter_rows(
    ds: Dataset, ranges: Mapping[str, tuple[float, float]]
) -> tuple[Dataset, int]:
    """Keep rows whose value in every keyed feature is missing or in [lo, hi].

    Missing values pass every range filter: missingness is corrected by
    imputation, never silently dropped here. Returns the filtered
    snapshot and the number of removed rows.
    """
    mask = np.ones(ds.n_rows, dtype=bool)
    for name, (lo, hi) in ranges.items():
        idx = ds.feature_index(name)
        if ds.schema[idx].kind != "numeric":
            raise UnknownFeature(f"feature {name!r} is not numeric")
        lo = float(lo)
        hi = float(hi)
        if lo > hi:
            raise InvertedRange(f"range for {name!r} has lo {lo} > hi {hi}")
        col = ds.matrix[:, idx]
        with np.errstate(invalid="ignore"):
            keep = np.isnan(col) | ((col >= lo) & (col <= hi))
        mask &= keep
    kept = np.flatnonzero(mask)
    removed = ds.n_rows - kept.size
    if removed == 0:
        return ds, 0
    return ds.subset_rows(kept), removed


def project_features(ds: Dataset, included: Iterable[str]) -> Dataset:
    """Restrict the dataset to *included* features, keeping schema order."""
    wanted = set(included)
    if not wanted:
        raise EmptySelection("at least one feature must be included")
    known = set(ds.feature_names)
    unknown = wanted - known
    if unknown:
        raise UnknownFeature(f"unknown feature(s): {sorted(unknown)}")
    if wanted == known:
        return ds
    cols = [i for i, s in enumerate(ds.schema) if s.name in wanted]
    schema = [ds.schema[i] for i in cols]
    return Dataset(
        schema, ds.target_name, ds.target_labels, ds.matrix[:, cols], ds.labels
    )
