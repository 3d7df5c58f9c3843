"""The 84-dimensional descriptive-statistics representation of a
recording: min, max, mean and population standard deviation of each of
the seven joints' position, velocity and effort channels.

Ordering contract: index = family*28 + joint*4 + stat with
family in (position=0, velocity=1, effort=2), joint in 0..6 and
stat in (min=0, max=1, mean=2, std=3).
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .gestures import GestureClass
from .telemetry import Recording

FEATURE_COUNT = 84
_FAMILIES = ("q", "dq", "tau")


def extract_features(recording: Recording) -> np.ndarray:
    """84-vector of per-channel descriptive statistics.

    Accumulation runs sample by sample in recording order, fixing the
    floating-point arithmetic order so independent implementations can
    reproduce the vector bit for bit.
    """
    blocks = []
    for name in _FAMILIES:
        arr = getattr(recording, name)  # (n, 7)
        n = len(arr)
        lo = arr[0].copy()
        hi = arr[0].copy()
        total = arr[0].copy()
        for i in range(1, n):
            row = arr[i]
            np.minimum(lo, row, out=lo)
            np.maximum(hi, row, out=hi)
            total = total + row
        mean = total / n
        sq = (arr[0] - mean) ** 2
        for i in range(1, n):
            sq = sq + (arr[i] - mean) ** 2
        std = np.sqrt(sq / n)  # population std (divide by n)
        stats = np.stack([lo, hi, mean, std], axis=1)  # (7, 4)
        blocks.append(stats.ravel())
    return np.concatenate(blocks)


def feature_name(index: int) -> str:
    family, rest = divmod(index, 28)
    joint, stat = divmod(rest, 4)
    return (f"{_FAMILIES[family]}{joint + 1}_"
            f"{('min', 'max', 'mean', 'std')[stat]}")


def build_feature_table(dataset):
    """Feature matrix plus aligned label/participant/trial columns."""
    X = np.array([extract_features(r) for r in dataset.recordings])
    y = [r.gesture for r in dataset.recordings]
    participants = np.array([r.participant_id for r in dataset.recordings])
    trials = np.array([r.trial_index for r in dataset.recordings])
    return X, y, participants, trials


def write_feature_table(dataset, path):
    """CSV export with columns participant,gesture,trial,f0..f83."""
    X, y, participants, trials = build_feature_table(dataset)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = ["participant", "gesture", "trial"] + [
            f"f{i}" for i in range(FEATURE_COUNT)]
        fh.write(",".join(header) + "\n")
        for i in range(len(X)):
            row = [str(participants[i]), y[i].value, str(trials[i])]
            row += [repr(float(v)) for v in X[i]]
            fh.write(",".join(row) + "\n")


def read_feature_table(path):
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected = ["participant", "gesture", "trial"] + [
            f"f{i}" for i in range(FEATURE_COUNT)]
        if header != expected:
            raise ValueError(f"{path}: unexpected feature table header")
        rows = list(reader)
    X = np.array([[float(v) for v in row[3:]] for row in rows])
    y = [GestureClass(row[1]) for row in rows]
    participants = np.array([int(row[0]) for row in rows])
    trials = np.array([int(row[2]) for row in rows])
    return X, y, participants, trials
