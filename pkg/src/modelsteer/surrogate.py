"""Surrogate decision rules distilled from the forest.

A single shallow CART tree is fit on the model's own predictions; its
root-to-leaf paths become human-readable rules. Rule confidence is
scored against the black-box model, not the surrogate: a rule explains
the model, so its reliability must be measured on the model's output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset
from .errors import EmptyDataset
from .forest import ModelArtifact, fit_tree, _FlatForest
from .shap_values import _collect_paths

SURROGATE_MAX_DEPTH = 4
SURROGATE_MIN_LEAF = 10
TOP_RULES = 5


@dataclass(frozen=True)
class RuleCondition:
    feature: str
    op: str  # "<=" or ">"
    threshold: float

    def to_dict(self) -> dict:
        return {"feature": self.feature, "op": self.op, "threshold": self.threshold}


@dataclass(frozen=True)
class DecisionRule:
    """Conjunction of threshold conditions and the class it predicts.

    ``coverage`` is the fraction of dataset rows satisfying every
    condition (missing values satisfy none); ``confidence`` is the
    fraction of covered rows on which the model itself predicts the
    rule's class; ``score`` is their product.
    """

    conditions: tuple[RuleCondition, ...]
    predicted_label: str
    coverage: float
    confidence: float
    score: float

    def to_dict(self) -> dict:
        return {
            "conditions": [c.to_dict() for c in self.conditions],
            "predicted_label": self.predicted_label,
            "coverage": self.coverage,
            "confidence": self.confidence,
            "score": self.score,
        }


def _covered_rows(ds: Dataset, conditions: Sequence[RuleCondition]) -> np.ndarray:
    mask = np.ones(ds.n_rows, dtype=bool)
    for cond in conditions:
        col = ds.matrix[:, ds.feature_index(cond.feature)]
        with np.errstate(invalid="ignore"):
            if cond.op == "<=":
                ok = col <= cond.threshold
            else:
                ok = col > cond.threshold
        mask &= np.where(np.isnan(col), False, ok)
    return mask


def surrogate_rules(
    m: ModelArtifact,
    ds: Dataset,
    max_depth: int = SURROGATE_MAX_DEPTH,
    min_leaf: int = SURROGATE_MIN_LEAF,
    top: int = TOP_RULES,
) -> tuple[list[DecisionRule], float]:
    """Distill the model into at most *top* rules plus a fidelity score.

    Fidelity is the fraction of rows where the surrogate tree agrees
    with the model's argmax prediction.
    """
    if ds.n_rows == 0:
        raise EmptyDataset("cannot distill rules from an empty dataset")
    X = ds.matrix
    model_pred = m.predict_classes(X)
    tree = fit_tree(X, model_pred, max_depth=max_depth, min_leaf=min_leaf)

    surrogate_proba = _FlatForest([tree]).predict(X)
    surrogate_pred = (surrogate_proba[:, 1] > surrogate_proba[:, 0]).astype(np.int64)
    fidelity = float(np.mean(surrogate_pred == model_pred))

    rules = []
    for constraints, leaf_p1 in _collect_paths(tree):
        conditions = []
        for f in sorted(constraints):
            lo, hi, _mok = constraints[f]
            name = ds.schema[f].name
            if lo > -math.inf:
                conditions.append(RuleCondition(name, ">", float(lo)))
            if hi < math.inf:
                conditions.append(RuleCondition(name, "<=", float(hi)))
        conditions = tuple(conditions)
        covered = _covered_rows(ds, conditions)
        n_cov = int(covered.sum())
        coverage = n_cov / ds.n_rows
        label_idx = 1 if leaf_p1 > 0.5 else 0  # argmax, ties to class 0
        if n_cov == 0:
            confidence = 0.0
        else:
            confidence = float(np.mean(model_pred[covered] == label_idx))
        rules.append(
            DecisionRule(
                conditions=conditions,
                predicted_label=ds.target_labels[label_idx],
                coverage=coverage,
                confidence=confidence,
                score=coverage * confidence,
            )
        )

    rules.sort(key=_rule_sort_key(ds))
    return rules[:top], fidelity


def _rule_sort_key(ds: Dataset):
    index = {s.name: i for i, s in enumerate(ds.schema)}

    def key(rule: DecisionRule):
        cond_key = tuple(
            (index[c.feature], c.op, c.threshold) for c in rule.conditions
        )
        return (-rule.score, -rule.coverage, cond_key)

    return key
