"""Dataset synthesis and persistence.

A dataset directory holds `manifest.json` plus one CSV per recording,
named `p{participant:02}_{gesture}_t{trial}.csv` with header
`t,q1..q7,dq1..dq7,tau1..tau7`.  Floats are written with 9 significant
digits and UNIX newlines; recordings are quantised to the same 9
significant digits when synthesised, so write/read round trips are
bit-exact.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gestures as ge
from .gestures import GestureClass, GESTURE_ORDER, StyleProfile
from .kinematics import (IKSettings, KinematicChain, UnreachableError,
                         follow_path, load_default_chain)
from .telemetry import DEFAULT_SAMPLE_RATE_HZ, Recording, sample_trajectory

SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"
_FLOAT_FMT = "%.9g"
_FILE_RE = re.compile(r"^p(\d{2,})_(LS|LW|HS|GL)_t(\d+)\.csv$")

# gesture anchors, robot base frame (metres): letters are written on a
# vertical plane through the writing origin, handshakes start at the
# grasp point
WRITING_ORIGIN_BASE = np.array([0.45, 0.0, 0.45])
GRASP_ORIGIN_BASE = np.array([0.45, 0.0, 0.38])

# predefined start configuration the arm is parked in before each run
HOME_Q = np.array([0.0, -np.pi / 4, 0.0, -3 * np.pi / 4, 0.0,
                   np.pi / 2, np.pi / 4])


class DatasetError(ValueError):
    """Dataset directory is malformed or inconsistent."""


class SynthesisError(RuntimeError):
    """IK failed while synthesising a recording."""

    def __init__(self, participant_id, gesture, trial_index, cause):
        self.participant_id = participant_id
        self.gesture = gesture
        self.trial_index = trial_index
        super().__init__(
            f"synthesis failed for participant {participant_id}, gesture "
            f"{gesture.value}, trial {trial_index}: {cause}")


@dataclass(frozen=True)
class Manifest:
    n_participants: int
    trials: int
    base_seed: int
    sample_rate: float = DEFAULT_SAMPLE_RATE_HZ
    schema_version: int = SCHEMA_VERSION


@dataclass
class Dataset:
    recordings: list
    manifest: Manifest

    def __post_init__(self):
        expected = self.manifest.n_participants * len(GESTURE_ORDER) \
            * self.manifest.trials
        if len(self.recordings) != expected:
            raise DatasetError(
                f"manifest promises {expected} recordings, got "
                f"{len(self.recordings)}")
        keys = [r.key() for r in self.recordings]
        if len(set(keys)) != len(keys):
            raise DatasetError("duplicate (participant, gesture, trial) keys")

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.manifest == other.manifest
                and sorted(self.recordings, key=lambda r: r.key())
                == sorted(other.recordings, key=lambda r: r.key()))

    def get(self, participant_id, gesture, trial_index) -> Recording:
        for r in self.recordings:
            if r.key() == (participant_id, gesture.value, trial_index):
                return r
        raise KeyError((participant_id, gesture.value, trial_index))


def _quantize_sig9(arr):
    """Round to 9 significant decimal digits (the on-disk precision)."""
    flat = arr.ravel()
    return np.array([float(_FLOAT_FMT % v) for v in flat]).reshape(arr.shape)


def gesture_origin(gesture: GestureClass, profile: StyleProfile,
                   chain: KinematicChain):
    """World-frame start position for a gesture under a style profile."""
    anchor = (WRITING_ORIGIN_BASE
              if gesture in (GestureClass.LS, GestureClass.LW)
              else GRASP_ORIGIN_BASE)
    e_h, e_f, e_v = ge.plane_axes(profile.plane_tilt)
    off = ge.START_OFFSETS[gesture] * profile.scale
    world = anchor + np.array([0.0, 0.0, chain.base_height])
    return world + off[0] * e_h + off[1] * e_f + off[2] * e_v


def synthesize_recording(gesture: GestureClass, profile: StyleProfile,
                         chain: KinematicChain, participant_id, trial_index,
                         effort_rng, rate=DEFAULT_SAMPLE_RATE_HZ,
                         ik_settings: IKSettings = IKSettings()) -> Recording:
    origin = gesture_origin(gesture, profile, chain)
    samples = ge.synth_path(gesture, profile, origin)
    times, positions = ge.path_arrays(samples)
    try:
        joints = np.asarray(
            follow_path(chain, positions, HOME_Q, ik_settings))
    except UnreachableError as exc:
        raise SynthesisError(participant_id, gesture, trial_index, exc) from exc
    t, q, dq, tau = sample_trajectory(times, joints, rate=rate,
                                      effort_rng=effort_rng)
    return Recording(
        t=_quantize_sig9(t), q=_quantize_sig9(q), dq=_quantize_sig9(dq),
        tau=_quantize_sig9(tau), gesture=gesture,
        participant_id=participant_id, trial_index=trial_index)


def synthesize_dataset(n_participants=16, trials=5, base_seed=42,
                       chain: KinematicChain | None = None,
                       rate=DEFAULT_SAMPLE_RATE_HZ,
                       ik_settings: IKSettings = IKSettings()) -> Dataset:
    """Full synthetic study: n_participants x 4 gestures x trials
    recordings, deterministic in base_seed."""
    if n_participants < 1 or trials < 1:
        raise ValueError("n_participants and trials must be >= 1")
    if chain is None:
        chain = load_default_chain()
    recordings = []
    for pid in range(n_participants):
        profile = ge.make_profile(pid, base_seed)
        for gidx, gesture in enumerate(GESTURE_ORDER):
            for trial in range(trials):
                tp = ge.trial_profile(profile, gidx * trials + trial)
                effort_rng = np.random.default_rng(
                    np.random.SeedSequence([base_seed, pid, gidx, trial, 3]))
                recordings.append(synthesize_recording(
                    gesture, tp, chain, pid, trial, effort_rng,
                    rate=rate, ik_settings=ik_settings))
    manifest = Manifest(n_participants=n_participants, trials=trials,
                        base_seed=base_seed, sample_rate=rate)
    return Dataset(recordings=recordings, manifest=manifest)


# -- persistence -------------------------------------------------------------

def recording_filename(recording: Recording) -> str:
    return (f"p{recording.participant_id:02d}_{recording.gesture.value}"
            f"_t{recording.trial_index}.csv")


def _csv_header():
    cols = ["t"]
    for prefix in ("q", "dq", "tau"):
        cols += [f"{prefix}{j}" for j in range(1, 8)]
    return ",".join(cols)


def write_dataset(dataset: Dataset, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    man = dataset.manifest
    manifest_doc = {
        "schema_version": man.schema_version,
        "n_participants": man.n_participants,
        "trials": man.trials,
        "base_seed": man.base_seed,
        "sample_rate": man.sample_rate,
    }
    with open(directory / MANIFEST_NAME, "w", encoding="utf-8",
              newline="\n") as fh:
        json.dump(manifest_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for rec in dataset.recordings:
        rows = np.column_stack([rec.t, rec.q, rec.dq, rec.tau])
        path = directory / recording_filename(rec)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_csv_header() + "\n")
            for row in rows:
                fh.write(",".join(_FLOAT_FMT % v for v in row) + "\n")


def _read_recording(path: Path, participant_id, gesture, trial_index):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != _csv_header():
            raise DatasetError(f"{path}:1: unexpected header {header!r}")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 22:
                raise DatasetError(
                    f"{path}:{lineno}: expected 22 columns, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from exc
    data = np.asarray(rows)
    if len(data) < 2:
        raise DatasetError(f"{path}: fewer than 2 samples")
    return Recording(t=data[:, 0], q=data[:, 1:8], dq=data[:, 8:15],
                     tau=data[:, 15:22], gesture=gesture,
                     participant_id=participant_id, trial_index=trial_index)


def read_dataset(directory) -> Dataset:
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    if not manifest_path.exists():
        raise DatasetError(f"{manifest_path} not found")
    with open(manifest_path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{manifest_path}: {exc}") from exc
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DatasetError(
            f"unknown schema_version {doc.get('schema_version')!r}; this "
            f"build reads version {SCHEMA_VERSION}")
    try:
        manifest = Manifest(
            n_participants=int(doc["n_participants"]),
            trials=int(doc["trials"]), base_seed=int(doc["base_seed"]),
            sample_rate=float(doc["sample_rate"]),
            schema_version=int(doc["schema_version"]))
    except KeyError as exc:
        raise DatasetError(f"{manifest_path}: missing field {exc}") from exc
    recordings = []
    for pid in range(manifest.n_participants):
        for gesture in GESTURE_ORDER:
            for trial in range(manifest.trials):
                name = f"p{pid:02d}_{gesture.value}_t{trial}.csv"
                path = directory / name
                if not path.exists():
                    raise DatasetError(
                        f"missing recording for (participant={pid}, "
                        f"gesture={gesture.value}, trial={trial}): {name}")
                recordings.append(
                    _read_recording(path, pid, gesture, trial))
    return Dataset(recordings=recordings, manifest=manifest)
