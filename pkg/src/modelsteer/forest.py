"""Random-forest classifier trained from scratch on the dataset snapshots.

CART trees with Gini impurity, bootstrap row sampling, and per-split
feature subsampling. Missing values never block a split: each internal
node learns a majority direction and routes missing values that way at
prediction time. Training is fully deterministic given (dataset,
hyperparameters); every stochastic draw comes from the purpose-keyed
streams in :mod:`modelsteer.rng`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from . import canonical, rng
from .dataset import Dataset
from .errors import (
    DimensionMismatch,
    SchemaMismatch,
    SingleClassData,
    TooFewRows,
)

HOLDOUT_FRACTION = 0.2
MIN_TRAIN_ROWS = 20


@dataclass(frozen=True)
class Hyperparameters:
    n_trees: int = 100
    max_depth: int = 6
    min_leaf: int = 5
    feature_subsample: float = 0.6
    seed: int = 42

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if not (0.0 < self.feature_subsample <= 1.0):
            raise ValueError("feature_subsample must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "feature_subsample": self.feature_subsample,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Hyperparameters":
        return cls(
            n_trees=int(doc.get("n_trees", 100)),
            max_depth=int(doc.get("max_depth", 6)),
            min_leaf=int(doc.get("min_leaf", 5)),
            feature_subsample=float(doc.get("feature_subsample", 0.6)),
            seed=int(doc.get("seed", 42)),
        )


class TreeNode:
    """One decision tree node; internal nodes split, leaves hold class probabilities."""

    __slots__ = ("feature", "threshold", "missing_left", "left", "right", "proba")

    def __init__(
        self,
        feature: int = -1,
        threshold: float = 0.0,
        missing_left: bool = True,
        left: "TreeNode | None" = None,
        right: "TreeNode | None" = None,
        proba: tuple[float, float] | None = None,
    ):
        self.feature = feature
        self.threshold = threshold
        self.missing_left = missing_left
        self.left = left
        self.right = right
        self.proba = proba

    @property
    def is_leaf(self) -> bool:
        return self.proba is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"proba": list(self.proba)}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "missing_left": self.missing_left,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TreeNode":
        if "proba" in doc:
            p = doc["proba"]
            return cls(proba=(float(p[0]), float(p[1])))
        return cls(
            feature=int(doc["feature"]),
            threshold=float(doc["threshold"]),
            missing_left=bool(doc["missing_left"]),
            left=cls.from_dict(doc["left"]),
            right=cls.from_dict(doc["right"]),
        )


class _FlatForest:
    """All trees of a forest flattened into shared arrays.

    Every row of a prediction batch walks all trees at once: positions
    form a (rows, trees) matrix of absolute node indices, advanced one
    level per iteration, so prediction cost scales with depth instead
    of node count.
    """

    __slots__ = ("feature", "threshold", "missing_left", "left", "right",
                 "proba", "roots")

    def __init__(self, trees: Sequence[TreeNode]):
        nodes: list[TreeNode] = []
        roots = []
        for root in trees:
            roots.append(len(nodes))
            stack = [root]
            while stack:
                node = stack.pop()
                nodes.append(node)
                if not node.is_leaf:
                    stack.append(node.right)
                    stack.append(node.left)
        index = {id(n): i for i, n in enumerate(nodes)}
        n = len(nodes)
        self.feature = np.full(n, -1, dtype=np.int32)
        self.threshold = np.zeros(n, dtype=np.float64)
        self.missing_left = np.zeros(n, dtype=bool)
        self.left = np.zeros(n, dtype=np.int32)
        self.right = np.zeros(n, dtype=np.int32)
        self.proba = np.zeros((n, 2), dtype=np.float64)
        self.roots = np.array(roots, dtype=np.int32)
        for i, node in enumerate(nodes):
            if node.is_leaf:
                self.proba[i] = node.proba
            else:
                self.feature[i] = node.feature
                self.threshold[i] = node.threshold
                self.missing_left[i] = node.missing_left
                self.left[i] = index[id(node.left)]
                self.right[i] = index[id(node.right)]

    def predict(self, X: np.ndarray) -> np.ndarray:
        n_rows = X.shape[0]
        pos = np.broadcast_to(self.roots, (n_rows, self.roots.size)).copy()
        row_ix = np.arange(n_rows)[:, None]
        while True:
            feat = self.feature[pos]
            active = feat >= 0
            if not active.any():
                break
            vals = X[row_ix, np.where(active, feat, 0)]
            with np.errstate(invalid="ignore"):
                go_left = np.where(
                    np.isnan(vals), self.missing_left[pos], vals <= self.threshold[pos]
                )
            nxt = np.where(go_left, self.left[pos], self.right[pos])
            pos = np.where(active, nxt, pos)
        return self.proba[pos].mean(axis=1)


class ModelArtifact:
    """A trained forest plus everything needed to reproduce and audit it."""

    def __init__(
        self,
        trees: Sequence[TreeNode],
        feature_names: Sequence[str],
        hyperparameters: Hyperparameters,
        train_snapshot_id: str,
        train_size: int,
    ):
        self.trees = list(trees)
        self.feature_names = tuple(feature_names)
        self.hyperparameters = hyperparameters
        self.train_snapshot_id = train_snapshot_id
        self.train_size = int(train_size)
        self._flat: _FlatForest | None = None

    def to_payload(self) -> dict:
        return {
            "v": 1,
            "kind": "model",
            "feature_names": list(self.feature_names),
            "hyperparameters": self.hyperparameters.to_dict(),
            "train_snapshot_id": self.train_snapshot_id,
            "train_size": self.train_size,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_payload(cls, doc: Mapping[str, Any]) -> "ModelArtifact":
        return cls(
            trees=[TreeNode.from_dict(t) for t in doc["trees"]],
            feature_names=doc["feature_names"],
            hyperparameters=Hyperparameters.from_dict(doc["hyperparameters"]),
            train_snapshot_id=doc["train_snapshot_id"],
            train_size=doc["train_size"],
        )

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        """Mean leaf probability across trees for each row of X; shape (n, 2)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            raise DimensionMismatch(
                f"expected {len(self.feature_names)} features, got {X.shape}"
            )
        if self._flat is None:
            self._flat = _FlatForest(self.trees)
        return self._flat.predict(X)

    def predict_classes(self, X: np.ndarray) -> np.ndarray:
        """Argmax class per row; ties go to class 0."""
        proba = self.predict_batch(X)
        return (proba[:, 1] > proba[:, 0]).astype(np.int64)


@dataclass(frozen=True)
class ModelMetrics:
    """Hold-out evaluation summary.

    ``confusion_counts[actual][predicted]`` with class 0 negative;
    ``positive_rate`` is the fraction of evaluated rows predicted
    positive.
    """

    holdout_accuracy: float
    train_size: int
    n_features: int
    confusion_counts: tuple[tuple[int, int], tuple[int, int]]
    positive_rate: float

    def to_dict(self) -> dict:
        return {
            "holdout_accuracy": self.holdout_accuracy,
            "train_size": self.train_size,
            "n_features": self.n_features,
            "confusion_counts": [list(r) for r in self.confusion_counts],
            "positive_rate": self.positive_rate,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ModelMetrics":
        cc = doc["confusion_counts"]
        return cls(
            holdout_accuracy=float(doc["holdout_accuracy"]),
            train_size=int(doc["train_size"]),
            n_features=int(doc["n_features"]),
            confusion_counts=(
                (int(cc[0][0]), int(cc[0][1])),
                (int(cc[1][0]), int(cc[1][1])),
            ),
            positive_rate=float(doc["positive_rate"]),
        )


# -- training ------------------------------------------------------------------


def stratified_split(ds: Dataset, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded stratified 80/20 split; returns (train_idx, holdout_idx) ascending.

    Per class the holdout takes round(0.2 * n_c) rows (at least one,
    never all of a class), drawn from a single seeded permutation:
    class 0 first, then class 1.
    """
    gen = rng.stream(seed, rng.SPLIT)
    train_parts = []
    holdout_parts = []
    for c in (0, 1):
        idx = np.flatnonzero(ds.labels == c)
        if idx.size == 0:
            continue
        perm = gen.permutation(idx)
        n_test = min(idx.size - 1, max(1, math.floor(HOLDOUT_FRACTION * idx.size + 0.5)))
        holdout_parts.append(perm[:n_test])
        train_parts.append(perm[n_test:])
    train_idx = np.sort(np.concatenate(train_parts))
    holdout_idx = np.sort(np.concatenate(holdout_parts))
    return train_idx, holdout_idx


def _gini_weighted(l0, l1, r0, r1):
    lt = l0 + l1
    rt = r0 + r1
    gl = 1.0 - (l0 * l0 + l1 * l1) / (lt * lt)
    gr = 1.0 - (r0 * r0 + r1 * r1) / (rt * rt)
    return (lt * gl + rt * gr) / (lt + rt)


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    depth: int,
    max_depth: int,
    min_leaf: int,
    k_features: int,
    gen: np.random.Generator | None,
) -> TreeNode:
    n = rows.size
    y_node = y[rows]
    c1 = int(y_node.sum())
    c0 = n - c1

    def leaf() -> TreeNode:
        return TreeNode(proba=(c0 / n, c1 / n))

    if depth >= max_depth or c0 == 0 or c1 == 0 or n < 2 * min_leaf:
        return leaf()

    n_features = X.shape[1]
    if gen is None:
        feats = np.arange(n_features)
    else:
        feats = np.sort(gen.permutation(n_features)[:k_features])
    parent_gini = 1.0 - (c0 * c0 + c1 * c1) / (n * n)

    best_w = np.inf
    best: tuple[int, float, bool] | None = None
    for f in feats:
        col = X[rows, f]
        miss = np.isnan(col)
        n_miss = int(miss.sum())
        m = n - n_miss
        if m < 2:
            continue
        v = col[~miss]
        yv = y_node[~miss]
        miss_c1 = int(y_node[miss].sum())
        miss_c0 = n_miss - miss_c1
        order = np.argsort(v, kind="stable")
        vs = v[order]
        ys = yv[order]
        boundaries = np.flatnonzero(vs[1:] != vs[:-1])
        if boundaries.size == 0:
            continue
        cum1 = np.cumsum(ys)
        nl_nm = boundaries + 1
        nr_nm = m - nl_nm
        l1 = cum1[boundaries]
        l0 = nl_nm - l1
        total1 = cum1[-1]
        r1 = total1 - l1
        r0 = nr_nm - r1
        # missing rows join whichever side holds more non-missing rows
        miss_left = nl_nm >= nr_nm
        ml = miss_left.astype(np.int64)
        mr = 1 - ml
        L0 = l0 + miss_c0 * ml
        L1 = l1 + miss_c1 * ml
        R0 = r0 + miss_c0 * mr
        R1 = r1 + miss_c1 * mr
        lt = L0 + L1
        rt = R0 + R1
        w = _gini_weighted(
            L0.astype(np.float64), L1.astype(np.float64),
            R0.astype(np.float64), R1.astype(np.float64),
        )
        valid = (lt >= min_leaf) & (rt >= min_leaf)
        if not valid.any():
            continue
        w = np.where(valid, w, np.inf)
        i = int(np.argmin(w))
        if w[i] < best_w:
            best_w = float(w[i])
            threshold = (vs[boundaries[i]] + vs[boundaries[i] + 1]) / 2.0
            best = (int(f), float(threshold), bool(miss_left[i]))

    if best is None or best_w >= parent_gini - 1e-12:
        return leaf()

    f, threshold, miss_left_flag = best
    col = X[rows, f]
    miss = np.isnan(col)
    with np.errstate(invalid="ignore"):
        go_left = np.where(miss, miss_left_flag, col <= threshold)
    left_rows = rows[go_left]
    right_rows = rows[~go_left]
    left = _grow_tree(X, y, left_rows, depth + 1, max_depth, min_leaf, k_features, gen)
    right = _grow_tree(X, y, right_rows, depth + 1, max_depth, min_leaf, k_features, gen)
    return TreeNode(
        feature=f, threshold=threshold, missing_left=miss_left_flag,
        left=left, right=right,
    )


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_leaf: int,
    k_features: int | None = None,
    gen: np.random.Generator | None = None,
) -> TreeNode:
    """Fit a single CART tree; with no generator, every feature is considered."""
    if k_features is None:
        k_features = X.shape[1]
    rows = np.arange(X.shape[0], dtype=np.int64)
    return _grow_tree(X, y, rows, 0, max_depth, min_leaf, k_features, gen)


def train(ds: Dataset, hp: Hyperparameters) -> tuple[ModelArtifact, ModelMetrics]:
    """Train a seeded forest on the 80% part, score it on the 20% part.

    Identical (dataset, hyperparameters) produce bit-identical artifacts
    and metrics regardless of tree evaluation order.
    """
    if ds.n_rows < MIN_TRAIN_ROWS:
        raise TooFewRows(f"need at least {MIN_TRAIN_ROWS} rows, have {ds.n_rows}")
    c0, c1 = ds.class_counts()
    if c0 == 0 or c1 == 0:
        raise SingleClassData("training data contains a single class")

    train_idx, holdout_idx = stratified_split(ds, hp.seed)
    Xtr = ds.matrix[train_idx]
    ytr = ds.labels[train_idx]
    n_features = ds.n_features
    k = max(1, math.floor(hp.feature_subsample * n_features + 0.5))

    trees = []
    n_train = train_idx.size
    for t in range(hp.n_trees):
        gen = rng.stream(hp.seed, rng.BOOTSTRAP, t)
        boot = gen.integers(0, n_train, size=n_train)
        Xb = Xtr[boot]
        yb = ytr[boot]
        rows = np.arange(n_train, dtype=np.int64)
        trees.append(_grow_tree(Xb, yb, rows, 0, hp.max_depth, hp.min_leaf, k, gen))

    artifact = ModelArtifact(
        trees=trees,
        feature_names=ds.feature_names,
        hyperparameters=hp,
        train_snapshot_id=ds.snapshot_id,
        train_size=n_train,
    )
    metrics = _score(artifact, ds.matrix[holdout_idx], ds.labels[holdout_idx])
    return artifact, metrics


def predict_proba(m: ModelArtifact, x: Sequence[float | None]) -> tuple[float, float]:
    """Class probability vector for one instance; missing entries allowed."""
    if len(x) != len(m.feature_names):
        raise DimensionMismatch(
            f"expected {len(m.feature_names)} values, got {len(x)}"
        )
    row = np.array(
        [np.nan if v is None else float(v) for v in x], dtype=np.float64
    )
    proba = m.predict_batch(row.reshape(1, -1))[0]
    return (float(proba[0]), float(proba[1]))


def evaluate(m: ModelArtifact, ds: Dataset) -> ModelMetrics:
    """Score argmax predictions against labels; ties go to class 0."""
    if tuple(ds.feature_names) != tuple(m.feature_names):
        raise SchemaMismatch(
            "dataset features do not match the model's feature list"
        )
    return _score(m, ds.matrix, ds.labels)


def _score(m: ModelArtifact, X: np.ndarray, y: np.ndarray) -> ModelMetrics:
    pred = m.predict_classes(X)
    tn = int(np.sum((y == 0) & (pred == 0)))
    fp = int(np.sum((y == 0) & (pred == 1)))
    fn = int(np.sum((y == 1) & (pred == 0)))
    tp = int(np.sum((y == 1) & (pred == 1)))
    total = X.shape[0]
    return ModelMetrics(
        holdout_accuracy=(tn + tp) / total,
        train_size=m.train_size,
        n_features=len(m.feature_names),
        confusion_counts=((tn, fp), (fn, tp)),
        positive_rate=(tp + fp) / total,
    )


def model_digest(m: ModelArtifact) -> str:
    return canonical.digest_of(m.to_payload())
