"""Manual steering: feature selection, range filtering, guardrails.

Guardrails reject configurations that would change the training data
too drastically (too few features, too few rows, or too large a row
drop) before anything is retrained; a softer warning band flags
sizeable but allowed drops. Validation never mutates state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .dataset import Dataset, filter_rows, project_features
from .errors import GuardrailViolation, UnknownFeature


@dataclass(frozen=True)
class ManualConfiguration:
    """Expert-issued manual data configuration against a base version."""

    included_features: frozenset[str]
    ranges: Mapping[str, tuple[float, float]]
    base_version: int | None = None

    def to_dict(self) -> dict:
        return {
            "included_features": sorted(self.included_features),
            "ranges": {
                name: [lo, hi] for name, (lo, hi) in sorted(self.ranges.items())
            },
            "base_version": self.base_version,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ManualConfiguration":
        ranges = {
            str(name): (float(pair[0]), float(pair[1]))
            for name, pair in dict(doc.get("ranges", {})).items()
        }
        return cls(
            included_features=frozenset(str(f) for f in doc["included_features"]),
            ranges=ranges,
            base_version=(
                int(doc["base_version"]) if doc.get("base_version") is not None else None
            ),
        )


@dataclass(frozen=True)
class GuardrailPolicy:
    max_row_drop_fraction: float = 0.5
    min_features: int = 2
    min_rows: int = 50
    warn_row_drop_fraction: float = 0.2

    def __post_init__(self):
        if self.warn_row_drop_fraction > self.max_row_drop_fraction:
            raise ValueError("warn_row_drop_fraction must not exceed max_row_drop_fraction")


@dataclass(frozen=True)
class GuardrailVerdict:
    """Outcome of validating a manual configuration: ok, warn, or reject."""

    status: str  # "ok" | "warn" | "reject"
    code: str | None = None
    messages: tuple[str, ...] = ()
    rows_kept: int = 0
    rows_dropped: int = 0
    dropped_fraction: float = 0.0
    n_features: int = 0

    @property
    def allowed(self) -> bool:
        return self.status in ("ok", "warn")

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "code": self.code,
            "messages": list(self.messages),
            "rows_kept": self.rows_kept,
            "rows_dropped": self.rows_dropped,
            "dropped_fraction": self.dropped_fraction,
            "n_features": self.n_features,
        }


def validate_manual(
    cfg: ManualConfiguration, ds: Dataset, policy: GuardrailPolicy | None = None
) -> GuardrailVerdict:
    """Check a manual configuration against the guardrail policy.

    Rejection precedence: min_features, then max_row_drop, then
    min_rows. Row counting uses filter semantics without touching any
    stored state.
    """
    policy = policy or GuardrailPolicy()
    known = set(ds.feature_names)
    unknown = set(cfg.included_features) - known
    if unknown:
        raise UnknownFeature(f"unknown feature(s): {sorted(unknown)}")
    outside = set(cfg.ranges) - set(cfg.included_features)
    if outside:
        raise UnknownFeature(
            f"range set on excluded feature(s): {sorted(outside)}"
        )

    n_features = len(cfg.included_features)
    if n_features < policy.min_features:
        return GuardrailVerdict(
            status="reject",
            code="min_features",
            messages=(
                f"configuration keeps {n_features} feature(s); "
                f"at least {policy.min_features} required",
            ),
            rows_kept=ds.n_rows,
            n_features=n_features,
        )

    projected = project_features(ds, cfg.included_features)
    filtered, removed = filter_rows(projected, cfg.ranges)
    kept = filtered.n_rows
    dropped_fraction = removed / ds.n_rows

    if dropped_fraction > policy.max_row_drop_fraction:
        return GuardrailVerdict(
            status="reject",
            code="max_row_drop",
            messages=(
                f"filters drop {dropped_fraction:.1%} of rows; "
                f"limit is {policy.max_row_drop_fraction:.1%}",
            ),
            rows_kept=kept,
            rows_dropped=removed,
            dropped_fraction=dropped_fraction,
            n_features=n_features,
        )
    if kept < policy.min_rows:
        return GuardrailVerdict(
            status="reject",
            code="min_rows",
            messages=(
                f"{kept} rows would remain; at least {policy.min_rows} required",
            ),
            rows_kept=kept,
            rows_dropped=removed,
            dropped_fraction=dropped_fraction,
            n_features=n_features,
        )
    if dropped_fraction > policy.warn_row_drop_fraction:
        return GuardrailVerdict(
            status="warn",
            messages=(
                f"filters drop {dropped_fraction:.1%} of rows "
                f"(warning threshold {policy.warn_row_drop_fraction:.1%})",
            ),
            rows_kept=kept,
            rows_dropped=removed,
            dropped_fraction=dropped_fraction,
            n_features=n_features,
        )
    return GuardrailVerdict(
        status="ok",
        rows_kept=kept,
        rows_dropped=removed,
        dropped_fraction=dropped_fraction,
        n_features=n_features,
    )


def apply_manual(
    cfg: ManualConfiguration, ds: Dataset, policy: GuardrailPolicy | None = None
) -> Dataset:
    """Project to the selected features, then filter rows by the ranges."""
    verdict = validate_manual(cfg, ds, policy)
    if not verdict.allowed:
        raise GuardrailViolation(
            verdict.code, verdict.messages[0], verdict=verdict.to_dict()
        )
    projected = project_features(ds, cfg.included_features)
    filtered, _removed = filter_rows(projected, cfg.ranges)
    return filtered
