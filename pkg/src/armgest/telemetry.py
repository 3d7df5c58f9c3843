"""Joint telemetry: resampling joint trajectories into timestamped
position/velocity/effort samples and the objective per-recording
measures (duration, maximum end-effector displacement)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gestures import GestureClass
from .kinematics import KinematicChain, ee_position

DEFAULT_SAMPLE_RATE_HZ = 100.0

# simple per-joint effort model: gravity torque + viscous friction + noise
EFFORT_GRAVITY_NM = np.array([0.0, 35.0, 0.0, 18.0, 0.0, 2.0, 0.0])
EFFORT_VISCOUS_NMS = 0.8
EFFORT_NOISE_SD_NM = 0.05


@dataclass(frozen=True)
class JointSample:
    t: float
    q: np.ndarray
    dq: np.ndarray
    tau: np.ndarray


@dataclass
class Recording:
    """One gesture execution: uniformly sampled joint telemetry."""

    t: np.ndarray  # (n,)
    q: np.ndarray  # (n, 7)
    dq: np.ndarray  # (n, 7)
    tau: np.ndarray  # (n, 7)
    gesture: GestureClass
    participant_id: int
    trial_index: int

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        n = len(self.t)
        if n < 2:
            raise ValueError("a recording needs at least 2 samples")
        if self.t[0] != 0.0 or np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must start at 0 and strictly increase")
        for name in ("q", "dq", "tau"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n, 7) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be a finite (n, 7) array")
            setattr(self, name, arr)

    def samples(self):
        return [JointSample(t=float(self.t[i]), q=self.q[i], dq=self.dq[i],
                            tau=self.tau[i]) for i in range(len(self.t))]

    def key(self):
        return (self.participant_id, self.gesture.value, self.trial_index)

    def __eq__(self, other):
        if not isinstance(other, Recording):
            return NotImplemented
        return (self.key() == other.key()
                and np.array_equal(self.t, other.t)
                and np.array_equal(self.q, other.q)
                and np.array_equal(self.dq, other.dq)
                and np.array_equal(self.tau, other.tau))


def effort_model(q, dq, noise_rng=None,
                 gravity=EFFORT_GRAVITY_NM,
                 viscous=EFFORT_VISCOUS_NMS,
                 noise_sd=EFFORT_NOISE_SD_NM):
    """Per-joint torque tau_j = g_j cos(q_j) + b dq_j + N(0, sd^2).

    A deliberately simple, configurable stand-in for the robot's effort
    channel; it correlates with the kinematics without modelling
    dynamics.  Pass noise_rng=None (or noise_sd=0) for the noiseless
    value.
    """
    q = np.asarray(q, dtype=float)
    dq = np.asarray(dq, dtype=float)
    tau = gravity * np.cos(q) + viscous * dq
    if noise_rng is not None and noise_sd > 0:
        tau = tau + noise_rng.normal(0.0, noise_sd, size=tau.shape)
    return tau


def sample_trajectory(times, joints, rate=DEFAULT_SAMPLE_RATE_HZ,
                            effort_rng=None):
    """Uniform resampling of a timed joint trajectory at `rate` Hz.

    Joint positions are linearly interpolated; velocities come from
    central finite differences (one-sided at the ends); efforts from
    effort_model.  Returns (t, q, dq, tau) arrays with
    floor(T * rate) + 1 rows.
    """
    times = np.asarray(times, dtype=float)
    joints = np.asarray(joints, dtype=float)
    if rate <= 0:
        raise ValueError("rate must be positive")
    span = times[-1] - times[0]
    n = int(np.floor(span * rate + 1e-9)) + 1
    if span <= 0 or n < 2:
        raise ValueError("trajectory span too short to yield 2 samples")
    t = np.arange(n) / rate
    q = np.empty((n, joints.shape[1]))
    for j in range(joints.shape[1]):
        q[:, j] = np.interp(t, times - times[0], joints[:, j])
    dq = np.empty_like(q)
    dt = 1.0 / rate
    dq[1:-1] = (q[2:] - q[:-2]) / (2.0 * dt)
    dq[0] = (q[1] - q[0]) / dt
    dq[-1] = (q[-1] - q[-2]) / dt
    tau = np.empty_like(q)
    for i in range(n):
        tau[i] = effort_model(q[i], dq[i], noise_rng=effort_rng)
    return t, q, dq, tau


def duration(recording: Recording) -> float:
    """Recording length in seconds (last minus first sample time)."""
    return float(recording.t[-1] - recording.t[0])


def max_displacement(recording: Recording, chain: KinematicChain) -> float:
    """Maximum end-effector distance from the recording's own first
    sample, via forward kinematics."""
    positions = np.array([ee_position(chain, qi) for qi in recording.q])
    return float(np.linalg.norm(positions - positions[0], axis=1).max())
