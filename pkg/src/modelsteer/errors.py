"""Engine error hierarchy with stable machine-readable codes.

Every error carries a ``code`` string that survives the HTTP boundary
unchanged, so clients can branch on it without parsing messages.
"""

from __future__ import annotations

from typing import Any


class SteeringError(Exception):
    """Base class for every engine error."""

    code = "internal"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details


# -- dataset ingestion and row operations --------------------------------

class MissingColumn(SteeringError):
    code = "missing_column"


class UnparseableCell(SteeringError):
    code = "unparseable_cell"

    def __init__(self, row: int, col: str, message: str | None = None):
        super().__init__(
            message or f"cell at row {row}, column {col!r} is not numeric",
            row=row, col=col,
        )


class UnknownLabel(SteeringError):
    code = "unknown_label"

    def __init__(self, row: int, value: str):
        super().__init__(f"row {row} has unknown label {value!r}", row=row, value=value)


class EmptyFile(SteeringError):
    code = "empty_file"


class UnknownFeature(SteeringError):
    code = "unknown_feature"


class InvertedRange(SteeringError):
    code = "inverted_range"


class EmptySelection(SteeringError):
    code = "empty_selection"


# -- model training and prediction ----------------------------------------

class TooFewRows(SteeringError):
    code = "too_few_rows"


class SingleClassData(SteeringError):
    code = "single_class_data"


class DimensionMismatch(SteeringError):
    code = "dimension_mismatch"


class SchemaMismatch(SteeringError):
    code = "schema_mismatch"


# -- explanations ----------------------------------------------------------

class TooManyFeatures(SteeringError):
    code = "too_many_features"


class EmptyBackground(SteeringError):
    code = "empty_background"


class EmptyDataset(SteeringError):
    code = "empty_dataset"


# -- steering --------------------------------------------------------------

class GuardrailViolation(SteeringError):
    """Rejected data configuration.

    ``code`` is the specific rejection reason (``min_features``,
    ``min_rows`` or ``max_row_drop``), not a generic marker, so the
    dashboard can show which guardrail fired.
    """

    def __init__(self, code: str, message: str, **details: Any):
        super().__init__(message, **details)
        self.code = code


class StaleBaseVersion(SteeringError):
    code = "stale_base_version"


class StaleIssue(SteeringError):
    code = "stale_issue"


class UnknownKind(SteeringError):
    code = "unknown_kind"


class UnknownVersion(SteeringError):
    code = "unknown_version"


class UnknownProject(SteeringError):
    code = "unknown_project"


# -- persistence -----------------------------------------------------------

class CorruptSnapshot(SteeringError):
    code = "corrupt_snapshot"


class DanglingReference(SteeringError):
    code = "dangling_reference"


class JournalParseError(SteeringError):
    code = "journal_parse_error"

    def __init__(self, line: int, message: str | None = None):
        super().__init__(message or f"journal line {line} is not valid JSON", line=line)
