"""Classification evaluation protocols and metrics.

Three protocols over a feature table: stratified 5-fold cross-validation
(80-20), the inverse 20-80 variant (train on each single fold, test on
the remaining four), and user-independent cross-subject evaluation with
disjoint participant groups.  Reports carry per-fold macro-f1, the mean,
the summed confusion matrix and a description of every split.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .forest import RandomForestModel, TrainConfig, predict, train_forest
from .gestures import GESTURE_ORDER, GestureClass

CLASS_LABELS = [g.value for g in GESTURE_ORDER]


@dataclass
class EvalReport:
    protocol: str
    seed: int
    fold_f1: list
    mean_f1: float
    confusion: np.ndarray  # (k, k) true x predicted counts
    splits: list  # one dict per fold: which rows trained / tested
    class_labels: list = field(default_factory=lambda: list(CLASS_LABELS))

    def to_json(self) -> str:
        return json.dumps({
            "protocol": self.protocol,
            "seed": self.seed,
            "class_labels": self.class_labels,
            "fold_f1": self.fold_f1,
            "mean_f1": self.mean_f1,
            "confusion": self.confusion.tolist(),
            "splits": self.splits,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        doc = json.loads(text)
        return cls(protocol=doc["protocol"], seed=doc["seed"],
                   fold_f1=doc["fold_f1"], mean_f1=doc["mean_f1"],
                   confusion=np.asarray(doc["confusion"]),
                   splits=doc["splits"], class_labels=doc["class_labels"])


def confusion_matrix(truths, predictions, class_labels=None):
    """Counts[i][j] = items of true class i predicted as class j."""
    if class_labels is None:
        class_labels = CLASS_LABELS
    truths = [t.value if isinstance(t, GestureClass) else t for t in truths]
    predictions = [p.value if isinstance(p, GestureClass) else p
                   for p in predictions]
    if len(truths) != len(predictions) or len(truths) == 0:
        raise ValueError("truths and predictions must be equal-length and "
                         "non-empty")
    index = {label: i for i, label in enumerate(class_labels)}
    cm = np.zeros((len(class_labels), len(class_labels)), dtype=np.int64)
    for t, p in zip(truths, predictions):
        cm[index[t], index[p]] += 1
    return cm


def macro_f1(cm) -> float:
    """Unweighted mean over classes of 2PR/(P+R); classes absent from
    both the truth and the predictions are skipped."""
    cm = np.asarray(cm, dtype=float)
    scores = []
    for i in range(len(cm)):
        true_total = cm[i].sum()
        pred_total = cm[:, i].sum()
        if true_total == 0 and pred_total == 0:
            continue
        precision = cm[i, i] / pred_total if pred_total else 0.0
        recall = cm[i, i] / true_total if true_total else 0.0
        scores.append(2 * precision * recall / (precision + recall)
                      if precision + recall else 0.0)
    return float(np.mean(scores)) if scores else 0.0


def _as_labels(y):
    return [v.value if isinstance(v, GestureClass) else v for v in y]


def _stratified_folds(y, k, rng):
    """Per-class shuffle then round-robin assignment; returns a fold
    index per row."""
    y = np.asarray(y)
    folds = np.empty(len(y), dtype=np.int64)
    for label in CLASS_LABELS:
        rows = np.flatnonzero(y == label)
        if len(rows) < k:
            raise ValueError(
                f"class {label} has {len(rows)} rows, need >= {k} to "
                f"stratify into {k} folds")
        rows = rng.permutation(rows)
        folds[rows] = np.arange(len(rows)) % k
    return folds


def _evaluate_split(X, y, train_rows, test_rows, config):
    model = train_forest(X[train_rows], [y[i] for i in train_rows],
                         CLASS_LABELS, config)
    preds = [predict(model, X[i]).label for i in test_rows]
    truths = [y[i] for i in test_rows]
    cm = confusion_matrix(truths, preds)
    return cm, macro_f1(cm)


def _fold_config(seed, fold):
    return TrainConfig(seed=int(np.random.SeedSequence(
        [seed, fold]).generate_state(1, dtype=np.uint64)[0] >> 2))


def _report(protocol, seed, fold_results, splits):
    fold_f1 = [f1 for _, f1 in fold_results]
    confusion = sum(cm for cm, _ in fold_results)
    return EvalReport(protocol=protocol, seed=seed, fold_f1=fold_f1,
                      mean_f1=float(np.mean(fold_f1)), confusion=confusion,
                      splits=splits)


def run_kfold(X, y, participants, trials, k=5, seed=0) -> EvalReport:
    """Stratified k-fold cross-validation (classical 80-20 at k=5)."""
    X = np.asarray(X, dtype=float)
    y = _as_labels(y)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    folds = _stratified_folds(y, k, rng)
    results, splits = [], []
    for fold in range(k):
        test_rows = np.flatnonzero(folds == fold)
        train_rows = np.flatnonzero(folds != fold)
        results.append(_evaluate_split(X, y, train_rows, test_rows,
                                       _fold_config(seed, fold)))
        splits.append({"fold": fold,
                       "test_rows": test_rows.tolist(),
                       "n_train": int(len(train_rows))})
    return _report("kfold", seed, results, splits)


def run_inverse(X, y, participants, trials, train_fraction=0.2, seed=0,
                single_draw=False) -> EvalReport:
    """Inverse split: small train set, large test set.

    When train_fraction = 1/k for integer k (default 0.2, k=5), each of
    the k stratified folds takes a turn as the training set and the
    other k-1 folds are tested, the mean over the k runs reported.
    `single_draw=True` instead evaluates one stratified draw.
    """
    X = np.asarray(X, dtype=float)
    y = _as_labels(y)
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    k = round(1.0 / train_fraction)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 13]))
    if single_draw or abs(k - 1.0 / train_fraction) > 1e-9:
        folds = _stratified_folds(y, max(2, round(1.0 / train_fraction)), rng)
        train_rows = np.flatnonzero(folds == 0)
        test_rows = np.flatnonzero(folds != 0)
        results = [_evaluate_split(X, y, train_rows, test_rows,
                                   _fold_config(seed, 0))]
        splits = [{"fold": 0, "train_rows": train_rows.tolist(),
                   "n_test": int(len(test_rows))}]
        return _report("inverse", seed, results, splits)
    folds = _stratified_folds(y, k, rng)
    results, splits = [], []
    for fold in range(k):
        train_rows = np.flatnonzero(folds == fold)
        test_rows = np.flatnonzero(folds != fold)
        results.append(_evaluate_split(X, y, train_rows, test_rows,
                                       _fold_config(seed, fold)))
        splits.append({"fold": fold, "train_rows": train_rows.tolist(),
                       "n_test": int(len(test_rows))})
    return _report("inverse", seed, results, splits)


def run_cross_subject(X, y, participants, trials, n_folds=2,
                      seed=0) -> EvalReport:
    """User-independent evaluation: participants split into disjoint
    groups; every ordered (train group, test group) pair is evaluated."""
    X = np.asarray(X, dtype=float)
    y = _as_labels(y)
    participants = np.asarray(participants)
    unique = np.unique(participants)
    if len(unique) % n_folds != 0:
        raise ValueError(
            f"{len(unique)} participants not divisible into {n_folds} "
            f"equal groups")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 17]))
    shuffled = rng.permutation(unique)
    groups = np.array_split(shuffled, n_folds)
    for a in range(n_folds):
        for b in range(n_folds):
            if a != b and set(groups[a]) & set(groups[b]):
                raise ValueError("participant groups overlap")
    results, splits = [], []
    direction = 0
    for a in range(n_folds):
        for b in range(n_folds):
            if a == b:
                continue
            train_rows = np.flatnonzero(np.isin(participants, groups[a]))
            test_rows = np.flatnonzero(np.isin(participants, groups[b]))
            results.append(_evaluate_split(
                X, y, train_rows, test_rows, _fold_config(seed, direction)))
            splits.append({
                "fold": direction,
                "train_participants": sorted(int(p) for p in groups[a]),
                "test_participants": sorted(int(p) for p in groups[b]),
            })
            direction += 1
    return _report("cross-subject", seed, results, splits)
