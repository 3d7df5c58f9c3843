"""Feature extraction: the 84-value ordering contract, a brute-force
oracle comparison, and invariance properties."""

import numpy as np
import pytest

from armgest.features import (FEATURE_COUNT, build_feature_table,
                              extract_features, feature_name,
                              read_feature_table, write_feature_table)
from armgest.gestures import GestureClass
from armgest.telemetry import Recording


def oracle_features(recording):
    """Straightforward per-channel loop version of the extraction
    contract (index = family*28 + joint*4 + stat), using the same
    arithmetic order as the mandated reductions so equality is exact."""
    out = np.empty(84)
    arrays = (recording.q, recording.dq, recording.tau)
    for family in range(3):
        arr = arrays[family]
        n = len(arr)
        for joint in range(7):
            lo, hi, total = np.inf, -np.inf, 0.0
            for i in range(n):  # one sample at a time, in order
                x = arr[i, joint]
                lo = min(lo, x)
                hi = max(hi, x)
                total = total + x
            mean = total / n
            sq = 0.0
            for i in range(n):
                d = arr[i, joint] - mean
                sq = sq + d * d
            base = family * 28 + joint * 4
            out[base + 0] = lo
            out[base + 1] = hi
            out[base + 2] = mean
            out[base + 3] = np.sqrt(sq / n)  # population std
    return out


def random_recording(rng, n=None):
    n = n or int(rng.integers(2, 60))
    t = np.cumsum(rng.uniform(0.005, 0.02, size=n))
    t -= t[0]
    t[0] = 0.0
    return Recording(t=t, q=rng.normal(size=(n, 7)),
                     dq=rng.normal(size=(n, 7)),
                     tau=rng.normal(size=(n, 7)),
                     gesture=GestureClass.LW, participant_id=0,
                     trial_index=0)


def test_feature_count_and_names():
    rng = np.random.default_rng(0)
    rec = random_recording(rng)
    assert extract_features(rec).shape == (FEATURE_COUNT,)
    assert feature_name(0) == "q1_min"
    assert feature_name(3) == "q1_std"
    assert feature_name(28) == "dq1_min"
    assert feature_name(83) == "tau7_std"


def test_matches_brute_force_oracle_exactly():
    rng = np.random.default_rng(123)
    for _ in range(100):
        rec = random_recording(rng)
        fast = extract_features(rec)
        slow = oracle_features(rec)
        assert np.array_equal(fast, slow)


def test_constant_recording_features():
    c = np.linspace(-0.5, 0.5, 7)
    rec = Recording(t=[0.0, 0.5, 1.0], q=np.tile(c, (3, 1)),
                    dq=np.zeros((3, 7)), tau=np.ones((3, 7)),
                    gesture=GestureClass.HS, participant_id=0, trial_index=0)
    f = extract_features(rec)
    for j in range(7):
        assert f[j * 4 + 0] == f[j * 4 + 1] == c[j]
        assert f[j * 4 + 2] == pytest.approx(c[j], abs=1e-15)
        assert f[j * 4 + 3] == pytest.approx(0.0, abs=1e-12)


def test_three_sample_toy_values():
    q = np.zeros((3, 7))
    q[:, 0] = [0.0, 0.2, 0.4]
    rec = Recording(t=[0.0, 0.1, 0.2], q=q, dq=np.zeros((3, 7)),
                    tau=np.zeros((3, 7)), gesture=GestureClass.LS,
                    participant_id=0, trial_index=0)
    f = extract_features(rec)
    assert f[0] == pytest.approx(0.0)
    assert f[1] == pytest.approx(0.4)
    assert f[2] == pytest.approx(0.2)
    assert f[3] == pytest.approx(0.16329932, abs=1e-8)


def test_sample_order_invariance():
    rng = np.random.default_rng(7)
    rec = random_recording(rng, n=40)
    perm = rng.permutation(40)
    t = np.arange(40) * 0.01
    shuffled = Recording(t=t, q=rec.q[perm], dq=rec.dq[perm],
                         tau=rec.tau[perm], gesture=rec.gesture,
                         participant_id=0, trial_index=0)
    f0, f1 = extract_features(rec), extract_features(shuffled)
    # min/max are exactly order-free; mean/std only up to summation order
    assert np.allclose(f0, f1, rtol=1e-12, atol=1e-14)
    for base in range(0, 84, 4):
        assert f0[base] == f1[base] and f0[base + 1] == f1[base + 1]


def test_position_shift_property():
    rng = np.random.default_rng(11)
    rec = random_recording(rng, n=30)
    shifted = Recording(t=rec.t, q=rec.q + 0.3, dq=rec.dq, tau=rec.tau,
                        gesture=rec.gesture, participant_id=0, trial_index=0)
    f0, f1 = extract_features(rec), extract_features(shifted)
    for j in range(7):
        for stat in (0, 1, 2):  # min, max, mean shift by c
            assert f1[j * 4 + stat] == pytest.approx(f0[j * 4 + stat] + 0.3)
        assert f1[j * 4 + 3] == pytest.approx(f0[j * 4 + 3])
    assert np.allclose(f0[28:], f1[28:])  # dq/tau untouched


def test_feature_table_round_trip(tmp_path, small_dataset):
    X, y, participants, trials = build_feature_table(small_dataset)
    assert X.shape == (len(small_dataset.recordings), FEATURE_COUNT)
    path = tmp_path / "features.csv"
    write_feature_table(small_dataset, path)
    X2, y2, p2, t2 = read_feature_table(path)
    assert np.array_equal(X, X2)
    assert y == y2
    assert np.array_equal(participants, p2)
    assert np.array_equal(trials, t2)


def test_feature_table_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nope,nope\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_feature_table(path)
