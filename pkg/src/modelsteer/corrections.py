"""Automated steering: issue detection, impact quantification, corrections.

Four detectors run over a snapshot: disguised missing values, Tukey
outliers, exact duplicate rows, and class imbalance. Each triggered
issue is quantified by an honest sandbox retrain: the reported impact
is the hold-out accuracy delta of applying just that correction with
the same hyperparameters, so selecting a single issue later commits
exactly the delta that was quoted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from . import rng
from .dataset import Dataset
from .errors import StaleIssue, UnknownKind
from .forest import Hyperparameters, train
from .profiling import duplicate_row_indices, tukey_fences

ISSUE_KINDS = ("duplicates", "disguised_missing", "outliers", "class_imbalance")
IMBALANCE_THRESHOLD = 0.8


@dataclass(frozen=True)
class ColumnStats:
    mean: float | None
    min: float | None
    max: float | None
    missing_count: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "min": self.min,
            "max": self.max,
            "missing_count": self.missing_count,
        }


@dataclass(frozen=True)
class CorrectionRecord:
    """Before/after evidence for one applied correction."""

    kind: str
    rows_before: int
    rows_after: int
    before: Mapping[str, ColumnStats]
    after: Mapping[str, ColumnStats]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rows_before": self.rows_before,
            "rows_after": self.rows_after,
            "before": {k: v.to_dict() for k, v in self.before.items()},
            "after": {k: v.to_dict() for k, v in self.after.items()},
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "CorrectionRecord":
        def stats(block):
            return {
                k: ColumnStats(
                    mean=v["mean"], min=v["min"], max=v["max"],
                    missing_count=int(v["missing_count"]),
                )
                for k, v in block.items()
            }

        return cls(
            kind=doc["kind"],
            rows_before=int(doc["rows_before"]),
            rows_after=int(doc["rows_after"]),
            before=stats(doc["before"]),
            after=stats(doc["after"]),
        )


@dataclass(frozen=True)
class DataIssue:
    kind: str
    affected_fraction: float
    affected_per_feature: Mapping[str, float] | None
    description: str
    estimated_accuracy_impact: float
    correction_summary: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "affected_fraction": self.affected_fraction,
            "affected_per_feature": (
                dict(self.affected_per_feature)
                if self.affected_per_feature is not None else None
            ),
            "description": self.description,
            "estimated_accuracy_impact": self.estimated_accuracy_impact,
            "correction_summary": self.correction_summary,
        }


@dataclass(frozen=True)
class CorrectionPlan:
    """Selected issue kinds to rectify, pinned to a base version."""

    selected_kinds: tuple[str, ...]
    base_version: int | None = None
    seed: int = 42

    def __post_init__(self):
        if not self.selected_kinds:
            raise UnknownKind("correction plan selects no issue kinds")
        if len(set(self.selected_kinds)) != len(self.selected_kinds):
            raise UnknownKind("correction plan repeats an issue kind")
        for kind in self.selected_kinds:
            if kind not in ISSUE_KINDS:
                raise UnknownKind(f"unknown issue kind {kind!r}")

    def to_dict(self) -> dict:
        return {
            "selected_kinds": list(self.selected_kinds),
            "base_version": self.base_version,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "CorrectionPlan":
        return cls(
            selected_kinds=tuple(str(k) for k in doc["selected_kinds"]),
            base_version=(
                int(doc["base_version"]) if doc.get("base_version") is not None else None
            ),
            seed=int(doc.get("seed", 42)),
        )


# -- detection -----------------------------------------------------------------


def _issue_present(ds: Dataset, kind: str) -> bool:
    if kind == "duplicates":
        return duplicate_row_indices(ds).size > 0
    if kind == "disguised_missing":
        return bool(np.isnan(ds.matrix).any())
    if kind == "outliers":
        return _outlier_counts(ds)[1] > 0
    if kind == "class_imbalance":
        c0, c1 = ds.class_counts()
        return min(c0, c1) / max(c0, c1) < IMBALANCE_THRESHOLD
    raise UnknownKind(f"unknown issue kind {kind!r}")


def _outlier_counts(ds: Dataset) -> tuple[dict[str, tuple[int, int]], int]:
    """Per-feature (outliers, non-missing) counts and the outlier total."""
    per_feature = {}
    total = 0
    for i, spec in enumerate(ds.schema):
        col = ds.matrix[:, i]
        values = col[~np.isnan(col)]
        count = 0
        if values.size:
            lo, hi = tukey_fences(values)
            count = int(np.sum((values < lo) | (values > hi)))
        per_feature[spec.name] = (count, int(values.size))
        total += count
    return per_feature, total


def detect_issues(ds: Dataset, hp: Hyperparameters) -> list[DataIssue]:
    """Run the four detectors and quantify each hit with a sandbox retrain.

    Issues come back ordered by absolute estimated impact, largest
    first; repeated calls on the same snapshot return identical lists.
    """
    _, base_metrics = train(ds, hp)
    base_acc = base_metrics.holdout_accuracy

    issues = []
    for kind in ISSUE_KINDS:
        if not _issue_present(ds, kind):
            continue
        plan = CorrectionPlan(selected_kinds=(kind,), seed=hp.seed)
        corrected, _records = apply_corrections(plan, ds)
        _, corrected_metrics = train(corrected, hp)
        impact = corrected_metrics.holdout_accuracy - base_acc
        issues.append(_describe_issue(ds, kind, impact))

    rank = {kind: i for i, kind in enumerate(ISSUE_KINDS)}
    issues.sort(key=lambda i: (-abs(i.estimated_accuracy_impact), rank[i.kind]))
    return issues


def _describe_issue(ds: Dataset, kind: str, impact: float) -> DataIssue:
    n_rows = ds.n_rows
    n_cells = n_rows * ds.n_features
    if kind == "disguised_missing":
        missing = np.isnan(ds.matrix).sum(axis=0)
        per_feature = {
            spec.name: int(missing[i]) / n_rows
            for i, spec in enumerate(ds.schema)
            if missing[i] > 0
        }
        fraction = float(missing.sum()) / n_cells
        cols = ", ".join(sorted(per_feature))
        return DataIssue(
            kind=kind,
            affected_fraction=fraction,
            affected_per_feature=per_feature,
            description=(
                f"{fraction:.1%} of cells have no recorded value "
                f"(blank or zero-coded). Affected: {cols}."
            ),
            estimated_accuracy_impact=impact,
            correction_summary=(
                "Fill each affected column with the median of its recorded values."
            ),
        )
    if kind == "outliers":
        per_counts, total = _outlier_counts(ds)
        present = sum(nm for _c, nm in per_counts.values())
        per_feature = {
            name: c / nm for name, (c, nm) in per_counts.items() if c > 0 and nm
        }
        fraction = total / present if present else 0.0
        cols = ", ".join(sorted(per_feature))
        return DataIssue(
            kind=kind,
            affected_fraction=fraction,
            affected_per_feature=per_feature,
            description=(
                f"{total} recorded value(s) fall outside the Tukey fences "
                f"of their column. Affected: {cols}."
            ),
            estimated_accuracy_impact=impact,
            correction_summary=(
                "Clamp out-of-fence values to the nearest fence (winsorize)."
            ),
        )
    if kind == "duplicates":
        dup = int(duplicate_row_indices(ds).size)
        return DataIssue(
            kind=kind,
            affected_fraction=dup / n_rows,
            affected_per_feature=None,
            description=(
                f"{dup} row(s) exactly repeat an earlier row, "
                "inflating their weight in training."
            ),
            estimated_accuracy_impact=impact,
            correction_summary="Drop exact duplicates, keeping first occurrences.",
        )
    if kind == "class_imbalance":
        c0, c1 = ds.class_counts()
        balance = min(c0, c1) / max(c0, c1)
        return DataIssue(
            kind=kind,
            affected_fraction=1.0 - balance,
            affected_per_feature=None,
            description=(
                f"Class counts are {c0} vs {c1} "
                f"(minority/majority ratio {balance:.2f}); "
                "the model may lean toward the majority class."
            ),
            estimated_accuracy_impact=impact,
            correction_summary=(
                "Randomly oversample the minority class to parity (seeded)."
            ),
        )
    raise UnknownKind(f"unknown issue kind {kind!r}")


# -- correction ----------------------------------------------------------------


def _column_stats(ds: Dataset) -> dict[str, ColumnStats]:
    out = {}
    for i, spec in enumerate(ds.schema):
        col = ds.matrix[:, i]
        values = col[~np.isnan(col)]
        out[spec.name] = ColumnStats(
            mean=float(values.mean()) if values.size else None,
            min=float(values.min()) if values.size else None,
            max=float(values.max()) if values.size else None,
            missing_count=int(np.isnan(col).sum()),
        )
    return out


def apply_corrections(
    plan: CorrectionPlan, ds: Dataset
) -> tuple[Dataset, list[CorrectionRecord]]:
    """Apply the plan's corrections in the fixed canonical order.

    Order is always duplicates, disguised_missing, outliers,
    class_imbalance regardless of how the plan lists them. Every plan
    kind must still be present on *ds*, otherwise StaleIssue.
    """
    for kind in plan.selected_kinds:
        if not _issue_present(ds, kind):
            raise StaleIssue(f"issue {kind!r} is not present on this snapshot")

    current = ds
    records = []
    for kind in ISSUE_KINDS:
        if kind not in plan.selected_kinds:
            continue
        before = _column_stats(current)
        rows_before = current.n_rows
        if kind == "duplicates":
            current = _drop_duplicates(current)
        elif kind == "disguised_missing":
            current = _impute_medians(current)
        elif kind == "outliers":
            current = _winsorize(current)
        else:
            current = _oversample_minority(current, plan.seed)
        records.append(
            CorrectionRecord(
                kind=kind,
                rows_before=rows_before,
                rows_after=current.n_rows,
                before=before,
                after=_column_stats(current),
            )
        )
    return current, records


def _drop_duplicates(ds: Dataset) -> Dataset:
    dups = set(duplicate_row_indices(ds).tolist())
    if not dups:
        return ds
    keep = [i for i in range(ds.n_rows) if i not in dups]
    return ds.subset_rows(keep)


def _impute_medians(ds: Dataset) -> Dataset:
    X = ds.matrix.copy()
    for i in range(ds.n_features):
        col = X[:, i]
        miss = np.isnan(col)
        if not miss.any():
            continue
        values = col[~miss]
        if values.size == 0:
            continue  # nothing to impute from
        col[miss] = float(np.median(values))
    return ds.replace_matrix(X)


def _winsorize(ds: Dataset) -> Dataset:
    X = ds.matrix.copy()
    for i in range(ds.n_features):
        col = X[:, i]
        present = ~np.isnan(col)
        values = col[present]
        if values.size == 0:
            continue
        lo, hi = tukey_fences(values)
        col[present] = np.clip(values, lo, hi)
    return ds.replace_matrix(X)


def _oversample_minority(ds: Dataset, seed: int) -> Dataset:
    c0, c1 = ds.class_counts()
    if c0 == c1:
        return ds
    minority = 0 if c0 < c1 else 1
    need = abs(c0 - c1)
    pool = np.flatnonzero(ds.labels == minority)
    gen = rng.stream(seed, rng.OVERSAMPLE)
    draws = pool[gen.integers(0, pool.size, size=need)]
    X = np.vstack([ds.matrix, ds.matrix[draws]])
    y = np.concatenate([ds.labels, ds.labels[draws]])
    return ds.replace_matrix(X, y)
