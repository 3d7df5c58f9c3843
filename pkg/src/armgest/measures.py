"""Objective measures over a dataset: per-gesture duration and maximum
end-effector displacement, aggregated per participant, with the
Friedman + pairwise Wilcoxon (Bonferroni) analysis."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .gestures import GESTURE_ORDER
from .kinematics import KinematicChain
from .stats import StatsResult, bonferroni, friedman_test, wilcoxon_signed_rank
from .telemetry import duration, max_displacement

MEASURES = ("duration", "distance")


@dataclass
class MeasureAnalysis:
    measure: str
    gesture_labels: list
    per_participant: np.ndarray  # (N, 4): per-participant median over trials
    medians: np.ndarray  # (4,)
    iqrs: np.ndarray  # (4,)
    friedman: StatsResult
    pairwise: list  # (label_a, label_b, StatsResult with corrected p)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "gestures": self.gesture_labels,
            "medians": self.medians.tolist(),
            "iqrs": self.iqrs.tolist(),
            "friedman": {
                "chi2": self.friedman.statistic, "df": self.friedman.df,
                "p": self.friedman.p_raw, "n": self.friedman.n,
            },
            "pairwise": [
                {"pair": [a, b], "W": r.statistic, "Z": r.z,
                 "p_raw": r.p_raw, "p_corrected": r.p_corrected,
                 "r": r.effect_size_r}
                for a, b, r in self.pairwise
            ],
        }


def measure_matrix(dataset, chain: KinematicChain, measure: str):
    """N x 4 matrix of per-participant medians (over trials) of the
    requested measure, columns ordered LS, LW, HS, GL."""
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; pick from {MEASURES}")
    pids = sorted({r.participant_id for r in dataset.recordings})
    matrix = np.empty((len(pids), len(GESTURE_ORDER)))
    for i, pid in enumerate(pids):
        for j, gesture in enumerate(GESTURE_ORDER):
            values = []
            for rec in dataset.recordings:
                if rec.participant_id == pid and rec.gesture == gesture:
                    if measure == "duration":
                        values.append(duration(rec))
                    else:
                        values.append(max_displacement(rec, chain))
            matrix[i, j] = np.median(values)
    return matrix


def analyze_measure(dataset, chain: KinematicChain,
                    measure: str) -> MeasureAnalysis:
    matrix = measure_matrix(dataset, chain, measure)
    medians = np.median(matrix, axis=0)
    q75, q25 = np.percentile(matrix, [75, 25], axis=0)
    fr = friedman_test(matrix)
    pairs = list(combinations(range(len(GESTURE_ORDER)), 2))
    pairwise = []
    for a, b in pairs:
        res = wilcoxon_signed_rank(matrix[:, a], matrix[:, b])
        res = StatsResult(
            test=res.test, statistic=res.statistic, z=res.z, df=res.df,
            p_raw=res.p_raw,
            p_corrected=bonferroni(res.p_raw, len(pairs)),
            effect_size_r=res.effect_size_r, n=res.n)
        pairwise.append((GESTURE_ORDER[a].value, GESTURE_ORDER[b].value, res))
    return MeasureAnalysis(
        measure=measure,
        gesture_labels=[g.value for g in GESTURE_ORDER],
        per_participant=matrix, medians=medians, iqrs=q75 - q25,
        friedman=fr, pairwise=pairwise)
