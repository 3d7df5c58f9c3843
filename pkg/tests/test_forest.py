"""From-scratch random forest: separability, determinism, tie-breaking,
impurity arithmetic, and the serialized model format."""

import numpy as np
import pytest

from armgest.forest import (ModelFormatError, TrainConfig, _best_split,
                            _gini, load_model, predict, predict_many,
                            serialize_model, train_forest)

LABELS = ["A", "B", "C", "D"]


def blob_data(seed=0, per_class=30, spread=0.3):
    rng = np.random.default_rng(seed)
    centers = np.array([[0, 0], [4, 0], [0, 4], [4, 4]], dtype=float)
    X, y = [], []
    for label, center in zip(LABELS, centers):
        X.append(center + spread * rng.normal(size=(per_class, 2)))
        y += [label] * per_class
    return np.vstack(X), y


def test_separable_blobs_fit_perfectly():
    X, y = blob_data()
    model = train_forest(X, y, LABELS, TrainConfig(n_trees=25, seed=1))
    preds = predict_many(model, X)
    assert all(p.label == t for p, t in zip(preds, y))
    votes = preds[0].votes
    assert votes.sum() == 25


def test_training_is_deterministic():
    X, y = blob_data(seed=3)
    a = train_forest(X, y, LABELS, TrainConfig(n_trees=10, seed=7))
    b = train_forest(X, y, LABELS, TrainConfig(n_trees=10, seed=7))
    assert serialize_model(a) == serialize_model(b)
    c = train_forest(X, y, LABELS, TrainConfig(n_trees=10, seed=8))
    assert serialize_model(a) != serialize_model(c)


def test_gini_values():
    assert _gini(np.array([2, 2]), 4) == pytest.approx(0.5)
    assert _gini(np.array([4, 0]), 4) == pytest.approx(0.0)
    assert _gini(np.array([1, 1, 1, 1]), 4) == pytest.approx(0.75)
    assert _gini(np.array([0, 0]), 0) == 0.0


def test_best_split_prefers_lowest_feature_then_threshold():
    # two identical features; both split y perfectly -> choose feature 0
    col = np.array([0.0, 1.0, 2.0, 3.0])
    X = np.stack([col, col], axis=1)
    y = np.array([0, 0, 1, 1])
    gain, f, thr = _best_split(X, y, np.arange(4), [1, 0], 2)
    assert f == 0
    assert thr == pytest.approx(1.5)  # midpoint between 1.0 and 2.0


def test_best_split_none_without_gain():
    X = np.zeros((4, 2))
    y = np.array([0, 1, 0, 1])
    assert _best_split(X, y, np.arange(4), [0, 1], 2) is None


def test_vote_ties_resolve_to_lowest_class_index():
    # one constant feature: every tree is a single leaf voting the
    # majority class; a 50-50 leaf resolves to the lower class index
    X = np.zeros((2, 1))
    y = ["B", "A"]
    model = train_forest(X, y, ["A", "B"], TrainConfig(n_trees=1, seed=0))
    pred = predict(model, np.zeros(1))
    assert pred.label in ("A", "B")
    leaf_counts = model.trees[0].counts[0]
    if leaf_counts[0] == leaf_counts[1]:
        assert pred.label == "A"


def test_constant_feature_is_never_split():
    X, y = blob_data(seed=5)
    X = np.hstack([X, np.full((len(X), 1), 3.14)])
    model = train_forest(X, y, LABELS, TrainConfig(n_trees=10, seed=2))
    for tree in model.trees:
        assert not np.any(tree.feature == 2)


def test_predict_rejects_wrong_width():
    X, y = blob_data()
    model = train_forest(X, y, LABELS, TrainConfig(n_trees=5, seed=0))
    with pytest.raises(ValueError):
        predict(model, np.zeros(3))


def test_serialization_round_trip():
    X, y = blob_data(seed=9)
    model = train_forest(X, y, LABELS, TrainConfig(n_trees=8, seed=4))
    payload = serialize_model(model)
    again = load_model(payload)
    assert serialize_model(again) == payload
    x = X[17]
    assert predict(again, x).label == predict(model, x).label
    assert np.array_equal(predict(again, x).votes, predict(model, x).votes)


def test_load_rejects_malformed_payloads():
    X, y = blob_data()
    payload = serialize_model(
        train_forest(X, y, LABELS, TrainConfig(n_trees=2, seed=0)))
    import json
    doc = json.loads(payload)
    cases = []
    bad = dict(doc)
    bad["magic"] = "something-else"
    cases.append(json.dumps(bad).encode())
    bad = json.loads(payload)
    bad["version"] = 99
    cases.append(json.dumps(bad).encode())
    bad = json.loads(payload)
    bad["trees"][0]["feature"][0] = 1000
    cases.append(json.dumps(bad).encode())
    bad = json.loads(payload)
    del bad["trees"][0]["counts"]
    cases.append(json.dumps(bad).encode())
    cases.append(payload[: len(payload) // 2])
    cases.append(b"not json at all")
    for case in cases:
        with pytest.raises(ModelFormatError):
            load_model(case)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(n_trees=0)
    with pytest.raises(ValueError):
        TrainConfig(min_samples_split=1)
    with pytest.raises(ValueError):
        TrainConfig(max_features=999).resolve_max_features(84)
    assert TrainConfig().resolve_max_features(84) == 9
