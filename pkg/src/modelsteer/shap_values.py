"""Exact Shapley attributions for forest predictions.

The value function is interventional: v(S) is the mean positive-class
probability over a background sample with the features in S pinned to
the explained instance. All 2^n subsets are enumerated (n capped at
12), so local accuracy (base value plus attributions equals the model
output) holds by construction and features the model never touches get
exactly zero.

Rather than materializing a composite matrix per subset, the engine
factors v over root-to-leaf paths: a path constrains each feature it
tests to an interval (plus a missing-value verdict), so its
contribution to v(S) is the leaf probability times [instance satisfies
the constraints of the pinned features] times the count of background
rows satisfying the rest. That is an exact algebraic regrouping of the
subset enumeration, shared across every instance explained against the
same background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng
from .dataset import Dataset
from .errors import EmptyBackground, TooManyFeatures
from .forest import ModelArtifact, TreeNode

MAX_ENUM_FEATURES = 12
BACKGROUND_SIZE = 100
IMPORTANCE_SAMPLE_SIZE = 50


@dataclass(frozen=True)
class ShapExplanation:
    """Per-feature attributions for one instance.

    ``base_value + sum(phi) == fx`` within floating tolerance.
    """

    phi: tuple[float, ...]
    base_value: float
    fx: float


@dataclass(frozen=True)
class FeatureImportance:
    feature: str
    mean_abs_phi: float
    mean_signed_phi: float
    actionable: bool
    rank: int

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "mean_abs_phi": self.mean_abs_phi,
            "mean_signed_phi": self.mean_signed_phi,
            "actionable": self.actionable,
            "rank": self.rank,
        }


@dataclass(frozen=True)
class GlobalImportance:
    """Dataset-level attribution summary, ranked by descending |phi| mean."""

    features: tuple[FeatureImportance, ...]

    def to_list(self) -> list[dict]:
        return [f.to_dict() for f in self.features]

    def by_name(self, name: str) -> FeatureImportance:
        for f in self.features:
            if f.feature == name:
                return f
        raise KeyError(name)


def _collect_paths(root: TreeNode) -> list[tuple[dict, float]]:
    """All root-to-leaf paths as ({feature: (lo, hi, missing_ok)}, leaf_p1).

    A non-missing value follows the path iff lo < value <= hi for every
    constrained feature; a missing value follows it iff missing_ok.
    """
    paths: list[tuple[dict, float]] = []

    def walk(node: TreeNode, constraints: dict) -> None:
        if node.is_leaf:
            paths.append((constraints, node.proba[1]))
            return
        f = node.feature
        lo, hi, mok = constraints.get(f, (-math.inf, math.inf, True))
        left = dict(constraints)
        left[f] = (lo, min(hi, node.threshold), mok and node.missing_left)
        walk(node.left, left)
        right = dict(constraints)
        right[f] = (max(lo, node.threshold), hi, mok and not node.missing_left)
        walk(node.right, right)

    walk(root, {})
    return paths


class _PathBucket:
    """Paths sharing the same number of constrained features (width)."""

    __slots__ = ("feat", "lo", "hi", "mok", "leaf", "counts_comp", "proj")

    def __init__(self, paths: list[tuple[dict, float]], n_features: int,
                 background: np.ndarray):
        w = len(paths[0][0])
        p = len(paths)
        self.feat = np.zeros((p, w), dtype=np.int64)
        self.lo = np.zeros((p, w))
        self.hi = np.zeros((p, w))
        self.mok = np.zeros((p, w), dtype=bool)
        self.leaf = np.zeros(p)
        for k, (constraints, leaf_p1) in enumerate(paths):
            self.leaf[k] = leaf_p1
            for j, (f, (lo, hi, mok)) in enumerate(sorted(constraints.items())):
                self.feat[k, j] = f
                self.lo[k, j] = lo
                self.hi[k, j] = hi
                self.mok[k, j] = mok

        # background satisfaction per (row, path, slot)
        b = background.shape[0]
        cols = background[:, self.feat]                      # (b, p, w)
        with np.errstate(invalid="ignore"):
            sat = np.where(
                np.isnan(cols),
                self.mok[None, :, :],
                (cols > self.lo[None, :, :]) & (cols <= self.hi[None, :, :]),
            )
        # counts[U] = background rows satisfying every slot in U (bitmask index)
        table = np.ones((b, p, 1), dtype=bool)
        for j in range(w):
            table = np.concatenate([table, table & sat[:, :, j:j + 1]], axis=2)
        counts = table.sum(axis=0, dtype=np.float64)          # (p, 2^w)
        comp = ((1 << w) - 1) ^ np.arange(1 << w)
        self.counts_comp = counts[:, comp]                    # indexed by pinned set T

        # mask -> pinned-slot bitmask T for every full-space subset mask
        masks = np.arange(1 << n_features, dtype=np.int64)
        proj = np.zeros((p, masks.size), dtype=np.int64)
        for j in range(w):
            proj |= (((masks[None, :] >> self.feat[:, j:j + 1]) & 1) << j)
        self.proj = proj

    def add_values(self, x: np.ndarray, v: np.ndarray) -> None:
        w = self.feat.shape[1]
        xv = x[self.feat]                                     # (p, w)
        with np.errstate(invalid="ignore"):
            a = np.where(np.isnan(xv), self.mok, (xv > self.lo) & (xv <= self.hi))
        atab = np.ones((self.feat.shape[0], 1), dtype=bool)
        for j in range(w):
            atab = np.concatenate([atab, atab & a[:, j:j + 1]], axis=1)
        contrib = self.leaf[:, None] * atab * self.counts_comp
        v += np.take_along_axis(contrib, self.proj, axis=1).sum(axis=0)


class ShapEngine:
    """Exact subset-enumeration Shapley over a fixed model and background."""

    def __init__(self, m: ModelArtifact, background: np.ndarray):
        n = len(m.feature_names)
        if n > MAX_ENUM_FEATURES:
            raise TooManyFeatures(
                f"exact enumeration is limited to {MAX_ENUM_FEATURES} features, got {n}"
            )
        background = np.asarray(background, dtype=np.float64)
        if background.ndim != 2 or background.shape[0] == 0:
            raise EmptyBackground("background sample must contain at least one row")
        if background.shape[1] != n:
            raise EmptyBackground(
                f"background has {background.shape[1]} columns, model expects {n}"
            )
        self.n = n
        self.n_background = background.shape[0]
        self.n_trees = len(m.trees)

        by_width: dict[int, list[tuple[dict, float]]] = {}
        for tree in m.trees:
            for constraints, leaf in _collect_paths(tree):
                by_width.setdefault(len(constraints), []).append((constraints, leaf))
        # a tree whose root is already a leaf contributes to every subset
        self.base_leaf_sum = sum(leaf for _, leaf in by_width.get(0, []))
        self.buckets = [
            _PathBucket(paths, n, background)
            for width, paths in sorted(by_width.items())
            if width > 0
        ]

        # Shapley kernel: weight of a coalition by its size
        fact = [math.factorial(k) for k in range(n + 1)]
        self._weights = np.array(
            [fact[s] * fact[n - s - 1] / fact[n] for s in range(n)]
        )
        self._sizes = np.array([bin(mask).count("1") for mask in range(1 << n)])

    def subset_values(self, x: Sequence[float | None] | np.ndarray) -> np.ndarray:
        """v(S) for every subset bitmask S; v[0] is the base value."""
        xa = np.array(
            [np.nan if v is None else float(v) for v in x], dtype=np.float64
        )
        if xa.size != self.n:
            raise TooManyFeatures(
                f"instance has {xa.size} values, model expects {self.n}"
            )
        v = np.full(
            1 << self.n, self.base_leaf_sum * self.n_background, dtype=np.float64
        )
        for bucket in self.buckets:
            bucket.add_values(xa, v)
        return v / (self.n_background * self.n_trees)

    def explain(self, x: Sequence[float | None] | np.ndarray) -> ShapExplanation:
        v = self.subset_values(x)
        n = self.n
        phi = []
        all_masks = np.arange(1 << n)
        for i in range(n):
            bit = 1 << i
            without = all_masks[(all_masks & bit) == 0]
            gains = v[without | bit] - v[without]
            phi.append(float(np.dot(self._weights[self._sizes[without]], gains)))
        return ShapExplanation(
            phi=tuple(phi),
            base_value=float(v[0]),
            fx=float(v[(1 << n) - 1]),
        )


def shap_exact(
    m: ModelArtifact,
    x: Sequence[float | None] | np.ndarray,
    background: np.ndarray,
) -> ShapExplanation:
    """Exact Shapley attribution of the positive-class probability at *x*.

    *background* is a (rows, features) matrix; missing entries (NaN or
    None) are allowed in both the instance and the background.
    """
    return ShapEngine(m, background).explain(x)


def global_importance(
    m: ModelArtifact,
    ds: Dataset,
    sample_size: int = IMPORTANCE_SAMPLE_SIZE,
    seed: int | None = None,
) -> GlobalImportance:
    """Aggregate exact attributions over a seeded row sample.

    Draw order from the explanation stream: explained rows first, then
    the background rows, so the same seed always explains the same
    instances against the same background.
    """
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    if seed is None:
        seed = m.hyperparameters.seed
    gen = rng.stream(seed, rng.EXPLAIN)
    n = ds.n_rows
    explain_rows = np.sort(gen.permutation(n)[: min(sample_size, n)])
    bg_rows = np.sort(gen.permutation(n)[:BACKGROUND_SIZE])
    engine = ShapEngine(m, ds.matrix[bg_rows])

    n_feat = ds.n_features
    abs_sum = np.zeros(n_feat)
    signed_sum = np.zeros(n_feat)
    for row in explain_rows:
        exp = engine.explain(ds.matrix[row])
        phi = np.array(exp.phi)
        abs_sum += np.abs(phi)
        signed_sum += phi
    k = explain_rows.size
    mean_abs = abs_sum / k
    mean_signed = signed_sum / k

    # rank 1..n by descending mean |phi|; ties keep schema order
    order = sorted(range(n_feat), key=lambda i: (-mean_abs[i], i))
    rank_of = {feat: r + 1 for r, feat in enumerate(order)}
    features = tuple(
        FeatureImportance(
            feature=spec.name,
            mean_abs_phi=float(mean_abs[i]),
            mean_signed_phi=float(mean_signed[i]),
            actionable=spec.actionable,
            rank=rank_of[i],
        )
        for i, spec in enumerate(ds.schema)
    )
    return GlobalImportance(features=features)
