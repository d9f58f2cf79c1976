"""Explanatory model steering: train, explain, and refine tabular classifiers.

The package trains a seeded random forest over an annotated tabular
dataset, explains it from both the model side (exact Shapley
importances, surrogate decision rules) and the data side (descriptive
insights, per-class histograms, quality scores), and lets a domain
expert steer it by reconfiguring the training data manually or through
one-click corrections, with every step versioned and replayable.
"""

from .bundle import ExplanationBundle, build_bundle
from .corrections import (
    CorrectionPlan,
    CorrectionRecord,
    DataIssue,
    apply_corrections,
    detect_issues,
)
from .dataset import (
    Dataset,
    FeatureSpec,
    Instance,
    filter_rows,
    ingest_csv,
    project_features,
)
from .forest import (
    Hyperparameters,
    ModelArtifact,
    ModelMetrics,
    evaluate,
    predict_proba,
    train,
)
from .manual_config import (
    GuardrailPolicy,
    GuardrailVerdict,
    ManualConfiguration,
    apply_manual,
    validate_manual,
)
from .orchestrator import (
    Orchestrator,
    SessionVersion,
    SteeringSession,
    verify_project,
)
from .profiling import data_quality, density_distributions, key_insights
from .shap_values import GlobalImportance, ShapEngine, global_importance, shap_exact
from .store import ProjectStore
from .surrogate import DecisionRule, surrogate_rules

__version__ = "0.1.0"

__all__ = [
    "CorrectionPlan",
    "CorrectionRecord",
    "DataIssue",
    "Dataset",
    "DecisionRule",
    "ExplanationBundle",
    "FeatureSpec",
    "GlobalImportance",
    "GuardrailPolicy",
    "GuardrailVerdict",
    "Hyperparameters",
    "Instance",
    "ManualConfiguration",
    "ModelArtifact",
    "ModelMetrics",
    "Orchestrator",
    "ProjectStore",
    "SessionVersion",
    "ShapEngine",
    "SteeringSession",
    "apply_corrections",
    "apply_manual",
    "build_bundle",
    "data_quality",
    "density_distributions",
    "detect_issues",
    "evaluate",
    "filter_rows",
    "global_importance",
    "ingest_csv",
    "key_insights",
    "predict_proba",
    "project_features",
    "shap_exact",
    "surrogate_rules",
    "train",
    "validate_manual",
    "verify_project",
]
