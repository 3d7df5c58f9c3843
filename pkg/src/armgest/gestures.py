"""Parametric end-effector paths for the four gesture classes.

Two letter gestures traced with a knob end effector (LS: a curved "S"
of two smooth arcs, LW: a sharp-edged "W" of four strokes with dwell
stops) and two handshake gestures performed on a hand end effector
(HS: formal grasp with vertical pumping, GL: informal diagonal
clasp-and-lock).  Canonical shapes hit fixed duration and displacement
constants; per-participant style profiles vary scale, tempo, plane tilt
and jitter around them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy import stats as sstats


class GestureClass(Enum):
    LS = "LS"
    LW = "LW"
    HS = "HS"
    GL = "GL"


GESTURE_ORDER = (GestureClass.LS, GestureClass.LW, GestureClass.HS,
                 GestureClass.GL)

# canonical per-gesture constants: with a default profile and zero jitter
# the generated path reproduces these exactly
CANONICAL_DURATION_S = {
    GestureClass.LS: 1.78,
    GestureClass.LW: 1.80,
    GestureClass.HS: 6.83,
    GestureClass.GL: 6.68,
}
CANONICAL_MAX_DISPLACEMENT_M = {
    GestureClass.LS: 0.34,
    GestureClass.LW: 0.31,
    GestureClass.HS: 0.16,
    GestureClass.GL: 0.28,
}

DEFAULT_PATH_RATE_HZ = 100.0

# dwell stops are "stopped" when speed stays under 1 mm/s for >= 80 ms
DWELL_SPEED_MPS = 1e-3
DWELL_MIN_S = 0.08
_LW_DWELL_S = 0.12  # per interior vertex, canonical

# axis-aligned box (world frame, metres) that gesture origins must occupy
WORKSPACE_BOX = ((0.05, -0.85, 0.0), (0.95, 0.85, 2.0))


@dataclass(frozen=True)
class PathSample:
    t: float
    position: np.ndarray


@dataclass(frozen=True)
class StyleProfile:
    participant_id: int
    scale: float = 1.0
    speed: float = 1.0
    jitter_amplitude: float = 0.004
    plane_tilt: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.5 <= self.scale <= 1.5:
            raise ValueError("scale must lie in [0.5, 1.5]")
        if not 0.5 <= self.speed <= 1.5:
            raise ValueError("speed must lie in [0.5, 1.5]")
        if not 0.0 <= self.jitter_amplitude <= 0.02:
            raise ValueError("jitter_amplitude must lie in [0, 0.02] m")


def _smoothstep(u):
    return u * u * (3.0 - 2.0 * u)


def _minjerk(u):
    return u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)


# -- canonical local shapes -------------------------------------------------
# Each generator maps phase u in [0, 1] to local coordinates
# (h, f, v) = (in-plane horizontal, forward/out-of-plane, vertical),
# starting at the origin, at canonical (scale 1) size.

_LS_R = CANONICAL_MAX_DISPLACEMENT_M[GestureClass.LS] / 4.0


def _shape_ls(u):
    # two tangent semicircular arcs, constant-speed in arc length under a
    # minimum-jerk profile: velocity vanishes only at the endpoints
    phi = _minjerk(u) * 2.0 * math.pi
    r = _LS_R
    h = np.where(phi <= math.pi, r * np.sin(phi), -r * np.sin(phi - math.pi))
    v = np.where(phi <= math.pi, -r + r * np.cos(phi),
                 -3.0 * r + r * np.cos(phi - math.pi))
    return np.column_stack([h, np.zeros_like(h), v])


_LW_W = CANONICAL_MAX_DISPLACEMENT_M[GestureClass.LW]
_LW_H = 0.6 * _LW_W
_LW_VERTICES = np.array([
    (0.0, 0.0),
    (_LW_W / 4.0, -_LW_H),
    (_LW_W / 2.0, -_LW_H / 2.0),
    (3.0 * _LW_W / 4.0, -_LW_H),
    (_LW_W, 0.0),
])


def _lw_schedule():
    """Phase boundaries for the alternating stroke/dwell segments."""
    total = CANONICAL_DURATION_S[GestureClass.LW]
    lengths = np.linalg.norm(np.diff(_LW_VERTICES, axis=0), axis=1)
    stroke_total = total - 3.0 * _LW_DWELL_S
    stroke_times = stroke_total * lengths / lengths.sum()
    bounds = [0.0]
    kinds = []  # (kind, stroke_index)
    for i in range(4):
        bounds.append(bounds[-1] + stroke_times[i] / total)
        kinds.append(("stroke", i))
        if i < 3:
            bounds.append(bounds[-1] + _LW_DWELL_S / total)
            kinds.append(("dwell", i))
    bounds[-1] = 1.0  # absorb accumulated rounding
    return np.asarray(bounds), kinds


_LW_BOUNDS, _LW_KINDS = _lw_schedule()


def _shape_lw(u):
    out = np.zeros((len(u), 3))
    seg_idx = np.clip(np.searchsorted(_LW_BOUNDS, u, side="right") - 1,
                      0, len(_LW_KINDS) - 1)
    for k, (kind, i) in enumerate(_LW_KINDS):
        mask = seg_idx == k
        if not mask.any():
            continue
        if kind == "stroke":
            lo, hi = _LW_BOUNDS[k], _LW_BOUNDS[k + 1]
            local = np.clip((u[mask] - lo) / (hi - lo), 0.0, 1.0)
            seg = _LW_VERTICES[i] + np.outer(
                _smoothstep(local), _LW_VERTICES[i + 1] - _LW_VERTICES[i])
        else:
            seg = np.tile(_LW_VERTICES[i + 1], (int(mask.sum()), 1))
        out[mask, 0] = seg[:, 0]
        out[mask, 2] = seg[:, 1]
    return out


_HS_AMP = 0.05
_HS_REACH = math.sqrt(CANONICAL_MAX_DISPLACEMENT_M[GestureClass.HS] ** 2
                      - _HS_AMP ** 2)
_HS_PHASES = np.array([1.5, 3.83, 1.5]) / CANONICAL_DURATION_S[GestureClass.HS]
_HS_CYCLES = 3


def _shape_hs(u):
    b0 = _HS_PHASES[0]
    b1 = b0 + _HS_PHASES[1]
    grasp = np.array([0.0, _HS_REACH, _HS_AMP])
    out = np.zeros((len(u), 3))
    m = u <= b0
    out[m] = np.outer(_smoothstep(u[m] / b0), grasp)
    m = (u > b0) & (u <= b1)
    uo = (u[m] - b0) / (b1 - b0)
    out[m, 1] = _HS_REACH
    out[m, 2] = _HS_AMP * np.cos(2.0 * math.pi * _HS_CYCLES * uo)
    m = u > b1
    ur = (u[m] - b1) / (1.0 - b1)
    out[m] = np.outer(1.0 - _smoothstep(ur), grasp)
    return out


_GL_CLASP = np.array([0.0, 0.17, -0.10])
_GL_LOCK = _GL_CLASP * (CANONICAL_MAX_DISPLACEMENT_M[GestureClass.GL]
                        / np.linalg.norm(_GL_CLASP))
_GL_BOW = 0.05
_GL_PHASES = np.array([1.6, 1.2, 2.0, 1.88]) / CANONICAL_DURATION_S[GestureClass.GL]


def _shape_gl(u):
    b = np.cumsum(_GL_PHASES)
    out = np.zeros((len(u), 3))
    m = u <= b[0]  # diagonal approach to the clasp point
    out[m] = np.outer(_smoothstep(u[m] / b[0]), _GL_CLASP)
    m = (u > b[0]) & (u <= b[1])  # clasp dwell
    out[m] = _GL_CLASP
    m = (u > b[1]) & (u <= b[2])  # pull-and-lock curve, bowed sideways
    s = _smoothstep((u[m] - b[1]) / (b[2] - b[1]))
    out[m] = _GL_CLASP + np.outer(s, _GL_LOCK - _GL_CLASP)
    out[m, 0] += _GL_BOW * np.sin(math.pi * s)
    m = u > b[2]  # release halfway back
    s = _smoothstep((u[m] - b[2]) / (1.0 - b[2]))
    out[m] = _GL_LOCK + np.outer(s, 0.5 * _GL_CLASP - _GL_LOCK)
    return out


_SHAPES = {
    GestureClass.LS: _shape_ls,
    GestureClass.LW: _shape_lw,
    GestureClass.HS: _shape_hs,
    GestureClass.GL: _shape_gl,
}

# offset of the path start from the gesture anchor (writing origin for
# letters, grasp point for handshakes), canonical scale, local coords
START_OFFSETS = {
    GestureClass.LS: np.array([0.0, 0.0, 2.0 * _LS_R]),
    GestureClass.LW: np.array([-_LW_W / 2.0, 0.0, _LW_H / 2.0]),
    GestureClass.HS: np.zeros(3),
    GestureClass.GL: np.zeros(3),
}


def plane_axes(plane_tilt: float):
    """In-plane horizontal, forward (plane normal) and vertical unit
    vectors for a vertical plane tilted about the z axis."""
    c, s = math.cos(plane_tilt), math.sin(plane_tilt)
    e_h = np.array([-s, c, 0.0])
    e_f = np.array([c, s, 0.0])
    e_v = np.array([0.0, 0.0, 1.0])
    return e_h, e_f, e_v


def _filtered_jitter(rng, n, amplitude):
    """Low-pass-filtered Gaussian positional noise with std `amplitude`."""
    noise = rng.standard_normal((n, 3))
    kernel = np.ones(9) / 9.0
    smooth = np.empty_like(noise)
    for axis in range(3):
        smooth[:, axis] = np.convolve(noise[:, axis], kernel, mode="same")
    sd = smooth.std()
    if sd > 0:
        smooth *= amplitude / sd
    return smooth


def synth_path(gesture: GestureClass, profile: StyleProfile, origin,
               rate: float = DEFAULT_PATH_RATE_HZ) -> list[PathSample]:
    """End-effector path for one gesture execution, starting at `origin`
    (world frame).  Deterministic in (gesture, profile, origin)."""
    origin = np.asarray(origin, dtype=float)
    lo, hi = np.asarray(WORKSPACE_BOX[0]), np.asarray(WORKSPACE_BOX[1])
    if np.any(origin < lo) or np.any(origin > hi):
        raise ValueError(f"origin {origin} outside workspace box")

    duration = CANONICAL_DURATION_S[gesture] / profile.speed
    n = round(duration * rate)
    t = np.linspace(0.0, duration, n + 1)
    local = _SHAPES[gesture](t / duration) * profile.scale
    e_h, e_f, e_v = plane_axes(profile.plane_tilt)
    positions = (origin + np.outer(local[:, 0], e_h)
                 + np.outer(local[:, 1], e_f) + np.outer(local[:, 2], e_v))
    if profile.jitter_amplitude > 0:
        rng = np.random.default_rng(np.random.SeedSequence([profile.seed]))
        positions = positions + _filtered_jitter(rng, n + 1,
                                                 profile.jitter_amplitude)
    return [PathSample(t=float(ti), position=pi)
            for ti, pi in zip(t, positions)]


def path_arrays(samples: list[PathSample]):
    t = np.array([s.t for s in samples])
    pos = np.array([s.position for s in samples])
    return t, pos


def detect_dwells(t, positions, speed_threshold=DWELL_SPEED_MPS,
                  min_duration=DWELL_MIN_S):
    """Intervals where the path speed stays below `speed_threshold` for
    at least `min_duration`, excluding the path endpoints."""
    t = np.asarray(t)
    positions = np.asarray(positions)
    dt = np.diff(t)
    speed = np.linalg.norm(np.diff(positions, axis=0), axis=1) / dt
    slow = speed < speed_threshold
    intervals = []
    start = None
    for i, s in enumerate(slow):
        if s and start is None:
            start = i
        elif not s and start is not None:
            intervals.append((start, i))
            start = None
    if start is not None:
        intervals.append((start, len(slow)))
    out = []
    for a, b in intervals:
        if a == 0 or b == len(slow):
            continue  # endpoint slow-down, not an interior stop
        if t[b] - t[a] >= min_duration:
            out.append((float(t[a]), float(t[b])))
    return out


# -- style profiles ---------------------------------------------------------

# population spreads: chosen by simulation so the synthetic population's
# per-gesture duration spread lands near the calibration targets while
# medians stay centred on the canonical constants
SPEED_SD = 3.0
SPEED_BOUNDS = (0.5, 1.5)
SCALE_SD = 0.25
SCALE_BOUNDS = (0.7, 1.3)

_STRATA = 16


def _truncnorm_ppf(u, mean, sd, bounds):
    a = (bounds[0] - mean) / sd
    b = (bounds[1] - mean) / sd
    return float(sstats.truncnorm.ppf(u, a, b, loc=mean, scale=sd))


def make_profile(participant_id: int, base_seed: int) -> StyleProfile:
    """Deterministic per-participant style.

    Scale and speed follow truncated normals centred on 1.0, sampled by
    inverse CDF over stratified uniforms keyed by (base_seed,
    participant_id): each block of 16 consecutive participant ids covers
    the distribution evenly, keeping small-population medians and
    spreads close to the distribution's own.
    """
    rng = np.random.default_rng(
        np.random.SeedSequence([base_seed, participant_id]))
    # decorrelated stratum orderings for the two quantities
    u_speed = (participant_id % _STRATA + rng.uniform(0.3, 0.7)) / _STRATA
    u_scale = ((participant_id * 11 + 5) % _STRATA
               + rng.uniform(0.3, 0.7)) / _STRATA

    jitter = float(rng.uniform(0.002, 0.008))
    tilt = float(np.clip(rng.normal(0.0, 0.08), -0.25, 0.25))
    seed = int(rng.integers(0, 2 ** 63))

    return StyleProfile(
        participant_id=participant_id,
        scale=_truncnorm_ppf(u_scale, 1.0, SCALE_SD, SCALE_BOUNDS),
        speed=_truncnorm_ppf(u_speed, 1.0, SPEED_SD, SPEED_BOUNDS),
        jitter_amplitude=jitter,
        plane_tilt=tilt,
        seed=seed,
    )


def trial_profile(profile: StyleProfile, trial_index: int) -> StyleProfile:
    """Same style, fresh jitter stream for a repeated trial."""
    ss = np.random.SeedSequence([profile.seed, trial_index])
    return replace(profile, seed=int(ss.generate_state(1)[0]))
