"""Dataset synthesis and persistence: counts, determinism, bit-exact
round trips, and located errors on malformed input."""

import numpy as np
import pytest

from armgest.dataset import (Dataset, DatasetError, Manifest,
                             read_dataset, recording_filename,
                             synthesize_dataset, write_dataset)
from armgest.gestures import GestureClass


def test_default_dataset_shape(default_dataset):
    assert len(default_dataset.recordings) == 320
    per_participant = {}
    for rec in default_dataset.recordings:
        per_participant.setdefault(rec.participant_id, 0)
        per_participant[rec.participant_id] += 1
    assert set(per_participant.values()) == {20}  # 4 gestures x 5 trials


def test_minimal_dataset_one_recording_per_gesture():
    ds = synthesize_dataset(n_participants=1, trials=1, base_seed=1)
    assert len(ds.recordings) == 4
    assert {r.gesture for r in ds.recordings} == set(GestureClass)


def test_round_trip_is_bit_exact(tmp_path, small_dataset):
    out = tmp_path / "ds"
    write_dataset(small_dataset, out)
    again = read_dataset(out)
    assert again.manifest == small_dataset.manifest
    assert again == small_dataset
    for a, b in zip(small_dataset.recordings, again.recordings):
        assert np.array_equal(a.t, b.t)
        assert np.array_equal(a.q, b.q)
        assert np.array_equal(a.dq, b.dq)
        assert np.array_equal(a.tau, b.tau)


def test_written_files_follow_naming_and_header(tmp_path, small_dataset):
    out = tmp_path / "ds"
    write_dataset(small_dataset, out)
    rec = small_dataset.recordings[0]
    path = out / recording_filename(rec)
    assert path.exists()
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",") == (
        ["t"] + [f"q{i}" for i in range(1, 8)]
        + [f"dq{i}" for i in range(1, 8)]
        + [f"tau{i}" for i in range(1, 8)])


def test_missing_recording_file_is_named(tmp_path, small_dataset):
    out = tmp_path / "ds"
    write_dataset(small_dataset, out)
    victim = out / recording_filename(small_dataset.recordings[5])
    victim.unlink()
    with pytest.raises(DatasetError) as exc:
        read_dataset(out)
    assert victim.name in str(exc.value)


def test_corrupt_row_reports_file_and_line(tmp_path, small_dataset):
    out = tmp_path / "ds"
    write_dataset(small_dataset, out)
    victim = out / recording_filename(small_dataset.recordings[0])
    lines = victim.read_text(encoding="utf-8").splitlines()
    lines[3] = lines[3].rsplit(",", 1)[0]  # drop a column on line 4
    victim.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(DatasetError) as exc:
        read_dataset(out)
    message = str(exc.value)
    assert victim.name in message and "4" in message


def test_unknown_schema_version_rejected(tmp_path, small_dataset):
    out = tmp_path / "ds"
    write_dataset(small_dataset, out)
    manifest = out / "manifest.json"
    manifest.write_text(
        manifest.read_text(encoding="utf-8").replace(
            '"schema_version": 1', '"schema_version": 99'),
        encoding="utf-8")
    with pytest.raises(DatasetError) as exc:
        read_dataset(out)
    assert "schema" in str(exc.value).lower()


def test_duplicate_keys_rejected(small_dataset):
    doubled = small_dataset.recordings + small_dataset.recordings[:1]
    manifest = Manifest(n_participants=4, trials=2, base_seed=7,
                        sample_rate=100.0)
    with pytest.raises(DatasetError):
        Dataset(recordings=doubled, manifest=manifest)


def test_synthesis_is_deterministic():
    a = synthesize_dataset(n_participants=1, trials=2, base_seed=11)
    b = synthesize_dataset(n_participants=1, trials=2, base_seed=11)
    assert a == b
    c = synthesize_dataset(n_participants=1, trials=2, base_seed=12)
    assert a != c


def test_write_does_not_mutate_inputs(tmp_path, small_dataset):
    before = [rec.q.copy() for rec in small_dataset.recordings]
    write_dataset(small_dataset, tmp_path / "ds")
    for rec, q in zip(small_dataset.recordings, before):
        assert np.array_equal(rec.q, q)
