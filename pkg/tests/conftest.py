"""Shared fixtures: the default synthetic dataset, its feature table and
a reference model, all session-scoped because synthesis is the expensive
step."""

import time

import pytest

from armgest.dataset import synthesize_dataset
from armgest.evaluation import CLASS_LABELS
from armgest.features import build_feature_table
from armgest.forest import TrainConfig, train_forest
from armgest.kinematics import load_default_chain


@pytest.fixture(scope="session")
def chain():
    return load_default_chain()


@pytest.fixture(scope="session")
def default_dataset_timed():
    start = time.perf_counter()
    dataset = synthesize_dataset()
    return dataset, time.perf_counter() - start


@pytest.fixture(scope="session")
def default_dataset(default_dataset_timed):
    return default_dataset_timed[0]


@pytest.fixture(scope="session")
def small_dataset():
    return synthesize_dataset(n_participants=4, trials=2, base_seed=7)


@pytest.fixture(scope="session")
def feature_table(default_dataset):
    return build_feature_table(default_dataset)


@pytest.fixture(scope="session")
def reference_model(feature_table):
    X, y, _, _ = feature_table
    return train_forest(X, [g.value for g in y], CLASS_LABELS,
                        TrainConfig(seed=0))
