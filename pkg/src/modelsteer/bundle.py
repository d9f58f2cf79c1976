"""Assembly of the complete explanation bundle served to the dashboard."""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import Dataset
from .forest import ModelArtifact, ModelMetrics
from .profiling import (
    DataQualityReport,
    DensityDistribution,
    KeyInsight,
    data_quality,
    density_distributions,
    key_insights,
)
from .shap_values import IMPORTANCE_SAMPLE_SIZE, GlobalImportance, global_importance
from .surrogate import DecisionRule, surrogate_rules


@dataclass(frozen=True)
class ExplanationBundle:
    """Everything one dashboard render needs, for one model version."""

    importance: GlobalImportance
    top_rules: tuple[DecisionRule, ...]
    surrogate_fidelity: float
    insights: tuple[KeyInsight, ...]
    distributions: tuple[DensityDistribution, ...]
    quality: DataQualityReport
    metrics: ModelMetrics
    accuracy_delta: float | None
    target_labels: tuple[str, str]

    def to_payload(self) -> dict:
        """Canonical dict; the accuracy_delta key is present only when a
        previous version exists."""
        labels = self.target_labels
        doc = {
            "v": 1,
            "kind": "bundle",
            "target_labels": list(labels),
            "global_importance": [
                f.to_dict()
                for f in sorted(self.importance.features, key=lambda f: f.rank)
            ],
            "top_rules": [r.to_dict() for r in self.top_rules],
            "surrogate_fidelity": self.surrogate_fidelity,
            "insights": [k.to_dict(labels) for k in self.insights],
            "distributions": [d.to_dict(labels) for d in self.distributions],
            "quality": self.quality.to_dict(labels),
            "metrics": self.metrics.to_dict(),
        }
        if self.accuracy_delta is not None:
            doc["accuracy_delta"] = self.accuracy_delta
        return doc


def build_bundle(
    m: ModelArtifact,
    metrics: ModelMetrics,
    ds: Dataset,
    previous_accuracy: float | None = None,
    importance_sample: int = IMPORTANCE_SAMPLE_SIZE,
) -> ExplanationBundle:
    """Regenerate every explanation for (model, dataset).

    The importance sample and background draws reuse the model's seed,
    so rebuilding from the same inputs is byte-identical.
    """
    importance = global_importance(m, ds, sample_size=importance_sample)
    rules, fidelity = surrogate_rules(m, ds)
    delta = None
    if previous_accuracy is not None:
        delta = metrics.holdout_accuracy - previous_accuracy
    return ExplanationBundle(
        importance=importance,
        top_rules=tuple(rules),
        surrogate_fidelity=fidelity,
        insights=tuple(key_insights(ds)),
        distributions=tuple(density_distributions(ds)),
        quality=data_quality(ds),
        metrics=metrics,
        accuracy_delta=delta,
        target_labels=ds.target_labels,
    )
