"""Random-forest classifier built from scratch.

Matches the commonly documented ensemble defaults: 100 trees, bootstrap
resampling, sqrt(n_features) candidate features per node, Gini impurity,
unlimited depth.  Fully deterministic: per-tree RNG streams are PCG64
generators seeded from (config.seed, tree_index), so the model is
reproducible regardless of how training is scheduled.

Tie-breaking is total: equal-gain splits prefer the lowest feature
index, then the smallest threshold; equal leaf counts and equal votes
prefer the lowest class index.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

MODEL_MAGIC = "armgest-forest"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    """Serialized model payload is malformed or has an unknown version."""


@dataclass(frozen=True)
class TrainConfig:
    n_trees: int = 100
    max_features: str | int = "sqrt"
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    max_depth: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")

    def resolve_max_features(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(math.isqrt(n_features)))
        m = int(self.max_features)
        if not 1 <= m <= n_features:
            raise ValueError("max_features out of range")
        return m


@dataclass
class Tree:
    """Flat node arrays; feature == -1 marks a leaf."""

    feature: np.ndarray  # (n_nodes,) int
    threshold: np.ndarray  # (n_nodes,) float
    left: np.ndarray  # (n_nodes,) int
    right: np.ndarray  # (n_nodes,) int
    counts: np.ndarray  # (n_nodes, n_classes) training class counts

    def predict_class(self, x) -> int:
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return int(np.argmax(self.counts[node]))  # argmax ties -> lowest


@dataclass
class RandomForestModel:
    trees: list
    class_labels: list  # ordered class identifiers (strings)
    config: TrainConfig
    feature_count: int


@dataclass(frozen=True)
class Prediction:
    label: str
    votes: np.ndarray  # per-class tree counts, sums to n_trees


def _gini(counts, total):
    if total == 0:
        return 0.0
    return 1.0 - float((counts.astype(float) ** 2).sum()) / (total * total)


def _best_split(X, y, idx, candidates, n_classes):
    """Best (feature, threshold) by Gini impurity decrease over the node
    rows `idx`; None when no split has positive gain.  Ties break toward
    the lowest feature index, then the smallest threshold."""
    n = len(idx)
    node_y = y[idx]
    parent_counts = np.bincount(node_y, minlength=n_classes)
    parent_gini = _gini(parent_counts, n)
    onehot = np.eye(n_classes)[node_y]
    best = None  # (gain, feature, threshold)
    for f in sorted(candidates):
        col = X[idx, f]
        order = np.argsort(col, kind="stable")
        sorted_vals = col[order]
        valid = sorted_vals[:-1] != sorted_vals[1:]
        if not valid.any():
            continue
        left = np.cumsum(onehot[order], axis=0)[:-1]  # counts after i+1 rows
        right = parent_counts - left
        n_left = np.arange(1, n)
        n_right = n - n_left
        gini_left = 1.0 - (left ** 2).sum(axis=1) / n_left ** 2
        gini_right = 1.0 - (right ** 2).sum(axis=1) / n_right ** 2
        gain = parent_gini - (n_left * gini_left + n_right * gini_right) / n
        gain[~valid] = -np.inf
        i = int(np.argmax(gain))  # first maximum -> smallest threshold
        if gain[i] > 1e-12 and (best is None or gain[i] > best[0] + 1e-12):
            best = (float(gain[i]), f,
                    0.5 * (sorted_vals[i] + sorted_vals[i + 1]))
    return best


def _grow_tree(X, y, rows, config, n_classes, rng, max_features):
    feature, threshold, left, right, counts = [], [], [], [], []

    def make_node(idx, depth):
        node_id = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        node_counts = np.bincount(y[idx], minlength=n_classes)
        counts.append(node_counts)
        pure = np.count_nonzero(node_counts) <= 1
        too_small = len(idx) < config.min_samples_split
        too_deep = (config.max_depth is not None
                    and depth >= config.max_depth)
        if pure or too_small or too_deep:
            return node_id
        candidates = rng.choice(X.shape[1], size=max_features, replace=False)
        best = _best_split(X, y, idx, candidates, n_classes)
        if best is None:
            return node_id
        _, f, thr = best
        mask = X[idx, f] <= thr
        if (mask.sum() < config.min_samples_leaf
                or (~mask).sum() < config.min_samples_leaf):
            return node_id
        feature[node_id] = f
        threshold[node_id] = thr
        left[node_id] = make_node(idx[mask], depth + 1)
        right[node_id] = make_node(idx[~mask], depth + 1)
        return node_id

    make_node(rows, 0)
    return Tree(feature=np.asarray(feature, dtype=np.int64),
                threshold=np.asarray(threshold, dtype=float),
                left=np.asarray(left, dtype=np.int64),
                right=np.asarray(right, dtype=np.int64),
                counts=np.asarray(counts, dtype=np.int64))


def train_forest(X, y, class_labels, config: TrainConfig = TrainConfig()
                 ) -> RandomForestModel:
    """Fit a forest on feature rows X and labels y.

    `y` entries must be members of `class_labels` (their index defines
    the class order used for all tie-breaking).  Deterministic given
    (X, y, config).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("X must be a non-empty 2-D array")
    label_index = {label: i for i, label in enumerate(class_labels)}
    y_idx = np.asarray([label_index[v] for v in y], dtype=np.int64)
    if len(y_idx) != len(X):
        raise ValueError("X and y lengths differ")
    n, n_features = X.shape
    n_classes = len(class_labels)
    max_features = config.resolve_max_features(n_features)
    trees = []
    for tree_index in range(config.n_trees):
        rng = np.random.default_rng(
            np.random.SeedSequence([config.seed & (2 ** 63 - 1), tree_index]))
        rows = rng.integers(0, n, size=n)  # bootstrap resample
        trees.append(_grow_tree(X, y_idx, rows, config, n_classes, rng,
                                max_features))
    return RandomForestModel(trees=trees, class_labels=list(class_labels),
                             config=config, feature_count=n_features)


def predict(model: RandomForestModel, x) -> Prediction:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.feature_count,):
        raise ValueError(
            f"feature vector has shape {x.shape}, model expects "
            f"({model.feature_count},)")
    votes = np.zeros(len(model.class_labels), dtype=np.int64)
    for tree in model.trees:
        votes[tree.predict_class(x)] += 1
    label = model.class_labels[int(np.argmax(votes))]  # ties -> lowest index
    return Prediction(label=label, votes=votes)


def predict_many(model, X):
    return [predict(model, x) for x in np.asarray(X, dtype=float)]


# -- persistence -------------------------------------------------------------

def serialize_model(model: RandomForestModel) -> bytes:
    doc = {
        "magic": MODEL_MAGIC,
        "version": MODEL_VERSION,
        "config": {
            "n_trees": model.config.n_trees,
            "max_features": model.config.max_features,
            "min_samples_split": model.config.min_samples_split,
            "min_samples_leaf": model.config.min_samples_leaf,
            "max_depth": model.config.max_depth,
            "seed": model.config.seed,
        },
        "class_labels": model.class_labels,
        "feature_count": model.feature_count,
        "trees": [
            {"feature": t.feature.tolist(),
             "threshold": t.threshold.tolist(),
             "left": t.left.tolist(),
             "right": t.right.tolist(),
             "counts": t.counts.tolist()}
            for t in model.trees
        ],
    }
    return json.dumps(doc, sort_keys=True).encode("utf-8")


def load_model(payload: bytes) -> RandomForestModel:
    try:
        doc = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"unreadable model payload: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("magic") != MODEL_MAGIC:
        raise ModelFormatError("missing model magic string")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(
            f"unknown model version {doc.get('version')!r}; this build "
            f"reads version {MODEL_VERSION}")
    try:
        config = TrainConfig(**doc["config"])
        feature_count = int(doc["feature_count"])
        class_labels = list(doc["class_labels"])
        trees = []
        for ti, td in enumerate(doc["trees"]):
            tree = Tree(feature=np.asarray(td["feature"], dtype=np.int64),
                        threshold=np.asarray(td["threshold"], dtype=float),
                        left=np.asarray(td["left"], dtype=np.int64),
                        right=np.asarray(td["right"], dtype=np.int64),
                        counts=np.asarray(td["counts"], dtype=np.int64))
            n_nodes = len(tree.feature)
            internal = tree.feature >= 0
            if np.any(tree.feature >= feature_count):
                raise ModelFormatError(
                    f"tree {ti}: feature index out of range")
            if not np.all(np.isfinite(tree.threshold)):
                raise ModelFormatError(f"tree {ti}: non-finite threshold")
            for name, child in (("left", tree.left), ("right", tree.right)):
                bad = internal & ((child < 0) | (child >= n_nodes))
                if np.any(bad):
                    raise ModelFormatError(
                        f"tree {ti}: {name} child index out of range")
            if tree.counts.shape != (n_nodes, len(class_labels)):
                raise ModelFormatError(f"tree {ti}: bad counts shape")
            trees.append(tree)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed model payload: {exc}") from exc
    return RandomForestModel(trees=trees, class_labels=class_labels,
                             config=config, feature_count=feature_count)
