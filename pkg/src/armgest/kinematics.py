"""Kinematics for a serial revolute arm: forward kinematics, geometric
Jacobian, damped least-squares inverse kinematics (position only) and a
free-guiding path follower.

Chains use the modified Denavit-Hartenberg convention: for joint i the
fixed link transform is Rx(alpha_i) * Tx(a_i), followed by the joint
rotation Rz(q_i + theta_offset_i) * Tz(d_i).  An optional tool offset
(translation in the last joint frame) ends the chain.  Positions are
reported in a world frame whose origin sits `base_height` below the
first joint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

CHAIN_FORMAT = "arm-chain"
CHAIN_VERSION = 1

DEFAULT_CHAIN_RESOURCE = "panda.json"


class ChainFormatError(ValueError):
    """Chain definition file is malformed or has an unsupported version."""


class InvalidSeedError(ValueError):
    """IK seed configuration violates joint limits."""


class UnreachableError(RuntimeError):
    """IK failed to reach the target within tolerance."""

    def __init__(self, residual: float, index: int | None = None):
        self.residual = float(residual)
        self.index = index
        where = "" if index is None else f" at path index {index}"
        super().__init__(
            f"target unreachable{where}: best residual {residual:.6g} m"
        )


@dataclass(frozen=True)
class Pose:
    """End-effector position (m, world frame) and orientation (unit
    quaternion, x-y-z-w)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        if abs(float(np.linalg.norm(self.orientation)) - 1.0) > 1e-9:
            raise ValueError("orientation quaternion must have unit norm")


@dataclass(frozen=True)
class IKSettings:
    damping: float = 0.1
    tolerance: float = 1e-4
    max_iterations: int = 100
    max_joint_step: float = 0.2

    def __post_init__(self):
        for name in ("damping", "tolerance", "max_iterations", "max_joint_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"IKSettings.{name} must be strictly positive")


class KinematicChain:
    """Immutable arm geometry: link parameters, joint limits, base height."""

    def __init__(self, alpha, a, d, theta_offset, limits, base_height=0.0,
                 tool=(0.0, 0.0, 0.0)):
        self.alpha = np.asarray(alpha, dtype=float)
        self.a = np.asarray(a, dtype=float)
        self.d = np.asarray(d, dtype=float)
        self.theta_offset = np.asarray(theta_offset, dtype=float)
        limits = np.asarray(limits, dtype=float)
        n = len(self.alpha)
        if n < 1:
            raise ValueError("chain needs at least one joint")
        for arr, name in ((self.a, "a"), (self.d, "d"),
                          (self.theta_offset, "theta_offset")):
            if arr.shape != (n,):
                raise ValueError(f"parameter '{name}' has wrong length")
        if limits.shape != (n, 2):
            raise ValueError("limits must be an n x 2 array")
        if np.any(limits[:, 0] > limits[:, 1]):
            raise ValueError("every joint limit interval must be non-empty")
        if not np.all(np.isfinite(self.a)) or np.any(np.abs(self.a) < 0):
            raise ValueError("link lengths must be finite")
        self.lower = limits[:, 0].copy()
        self.upper = limits[:, 1].copy()
        self.base_height = float(base_height)
        self.tool = np.asarray(tool, dtype=float)
        self.n_joints = n
        # fixed per-link transforms Rx(alpha) Tx(a), precomputed once
        self._link = np.zeros((n, 4, 4))
        for i in range(n):
            ca, sa = math.cos(self.alpha[i]), math.sin(self.alpha[i])
            self._link[i] = [[1, 0, 0, self.a[i]],
                             [0, ca, -sa, 0],
                             [0, sa, ca, 0],
                             [0, 0, 0, 1]]
        for arr in (self.alpha, self.a, self.d, self.theta_offset,
                    self.lower, self.upper, self.tool, self._link):
            arr.flags.writeable = False

    # -- limits ----------------------------------------------------------

    def within_limits(self, q) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= self.lower) and np.all(q <= self.upper))

    def require_within_limits(self, q):
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n_joints,):
            raise ValueError(
                f"joint vector has length {q.shape}, chain has "
                f"{self.n_joints} joints")
        if not self.within_limits(q):
            raise ValueError("joint vector violates joint limits")
        return q

    def clamp(self, q):
        return np.clip(q, self.lower, self.upper)

    def mid_configuration(self):
        return 0.5 * (self.lower + self.upper)

    # -- persistence -----------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "KinematicChain":
        if doc.get("format") != CHAIN_FORMAT:
            raise ChainFormatError("not an arm-chain definition")
        if doc.get("version") != CHAIN_VERSION:
            raise ChainFormatError(
                f"unsupported chain version {doc.get('version')!r}; "
                f"this build reads version {CHAIN_VERSION}")
        if doc.get("convention") != "modified-dh":
            raise ChainFormatError(
                f"unknown axis convention {doc.get('convention')!r}")
        try:
            joints = doc["joints"]
            return cls(
                alpha=[j["alpha_rad"] for j in joints],
                a=[j["a_m"] for j in joints],
                d=[j["d_m"] for j in joints],
                theta_offset=[j.get("theta_offset_rad", 0.0) for j in joints],
                limits=[j["limits_rad"] for j in joints],
                base_height=doc.get("base_height_m", 0.0),
                tool=doc.get("tool_offset_m", (0.0, 0.0, 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ChainFormatError(f"malformed chain definition: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "format": CHAIN_FORMAT,
            "version": CHAIN_VERSION,
            "convention": "modified-dh",
            "base_height_m": self.base_height,
            "tool_offset_m": list(self.tool),
            "joints": [
                {"alpha_rad": float(self.alpha[i]), "a_m": float(self.a[i]),
                 "d_m": float(self.d[i]),
                 "theta_offset_rad": float(self.theta_offset[i]),
                 "limits_rad": [float(self.lower[i]), float(self.upper[i])]}
                for i in range(self.n_joints)
            ],
        }

    @classmethod
    def from_file(cls, path) -> "KinematicChain":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ChainFormatError(f"{path}: {exc}") from exc
        return cls.from_dict(doc)


def load_default_chain() -> KinematicChain:
    """Bundled Franka-style 7-joint chain on a 0.61 m table."""
    text = resources.files("armgest.data").joinpath(
        DEFAULT_CHAIN_RESOURCE).read_text()
    return KinematicChain.from_dict(json.loads(text))


# -- forward kinematics ----------------------------------------------------

def _frames(chain: KinematicChain, q):
    """Joint rotation-axis origins and directions plus the end-effector
    transform, all in the world frame."""
    n = chain.n_joints
    T = np.eye(4)
    T[2, 3] = chain.base_height
    origins = np.empty((n, 3))
    axes = np.empty((n, 3))
    theta = q + chain.theta_offset
    M = np.eye(4)
    for i in range(n):
        T = T @ chain._link[i]
        origins[i] = T[:3, 3]
        axes[i] = T[:3, 2]
        c, s = math.cos(theta[i]), math.sin(theta[i])
        M[0, 0] = c
        M[0, 1] = -s
        M[1, 0] = s
        M[1, 1] = c
        M[2, 3] = chain.d[i]
        T = T @ M
    position = T[:3, 3] + T[:3, :3] @ chain.tool
    return origins, axes, position, T[:3, :3]


def forward_kinematics(chain: KinematicChain, q) -> Pose:
    """End-effector pose for joint angles `q` (radians, within limits)."""
    q = chain.require_within_limits(q)
    _, _, position, rot = _frames(chain, q)
    quat = Rotation.from_matrix(rot).as_quat()
    quat = quat / np.linalg.norm(quat)
    return Pose(position=position, orientation=quat)


def ee_position(chain: KinematicChain, q):
    """Position-only FK without limit checks (internal fast path)."""
    _, _, position, _ = _frames(chain, q)
    return position


def jacobian(chain: KinematicChain, q):
    """6 x n geometric Jacobian (linear stacked over angular)."""
    q = chain.require_within_limits(q)
    origins, axes, position, _ = _frames(chain, q)
    J = np.empty((6, chain.n_joints))
    J[:3] = np.cross(axes, position - origins).T
    J[3:] = axes.T
    return J


# -- inverse kinematics ----------------------------------------------------

# gain pulling redundant joints toward the seed in the IK null space
_NULLSPACE_GAIN = 0.1


def _ik_step(chain, q, seed, target, settings):
    origins, axes, position, _ = _frames(chain, q)
    err = target - position
    residual = float(np.linalg.norm(err))
    J = np.cross(axes, position - origins).T  # 3 x n linear part
    # scale damping down with the residual so the last millimetres
    # converge quickly; the configured value bounds steps far away
    lam = settings.damping * min(1.0, residual / 0.05 + 1e-3)
    A = J @ J.T + (lam ** 2) * np.eye(3)
    dq = J.T @ np.linalg.solve(A, err)
    # damp toward the seed in the exact null space of the position task;
    # suspended for the final approach so its second-order position error
    # cannot stall convergence below tolerance
    if residual > 50 * settings.tolerance:
        N = np.eye(chain.n_joints) - np.linalg.pinv(J) @ J
        dq = dq + _NULLSPACE_GAIN * (N @ (seed - q))
    np.clip(dq, -settings.max_joint_step, settings.max_joint_step, out=dq)
    return residual, chain.clamp(q + dq)


def solve_ik_position(chain: KinematicChain, target, seed,
                      settings: IKSettings = IKSettings()):
    """Joint angles whose end-effector position matches `target` within
    `settings.tolerance`, damped-least-squares iteration from `seed`.

    Orientation is left free (free-guiding: the hand imposes position
    only).  Deterministic; joint limits are enforced by clamping after
    every step.  Raises UnreachableError with the best residual if the
    tolerance is not met within `settings.max_iterations`.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (3,):
        raise ValueError("target must be a 3-vector")
    seed = np.asarray(seed, dtype=float)
    if seed.shape != (chain.n_joints,):
        raise ValueError("seed length does not match chain")
    if not chain.within_limits(seed):
        raise InvalidSeedError("seed configuration violates joint limits")

    best = math.inf
    for start in _ik_starts(chain, seed, target):
        q = start.copy()
        for _ in range(settings.max_iterations):
            residual, q_next = _ik_step(chain, q, seed, target, settings)
            if residual <= settings.tolerance:
                return q
            best = min(best, residual)
            q = q_next
        residual = float(np.linalg.norm(target - ee_position(chain, q)))
        if residual <= settings.tolerance:
            return q
        best = min(best, residual)
    raise UnreachableError(best)


def _ik_starts(chain, seed, target):
    """Deterministic restart configurations: the seed itself, then the
    seed with the base joint swung toward the target azimuth, then the
    mid-range configuration with the same swing."""
    yield seed
    azimuth = math.atan2(target[1], target[0])
    swung = seed.copy()
    swung[0] = min(max(azimuth, chain.lower[0]), chain.upper[0])
    yield swung
    mid = chain.mid_configuration()
    mid[0] = swung[0]
    yield mid


MAX_PATH_STEP_M = 0.05


def follow_path(chain: KinematicChain, path, seed,
                settings: IKSettings = IKSettings()):
    """Solve IK along an ordered list of positions, seeding each solve
    with the previous solution (free-guiding drag simulation).

    `path` points must be at most MAX_PATH_STEP_M apart; densify first.
    Returns one joint vector per path point.
    """
    path = np.asarray(path, dtype=float)
    if path.ndim != 2 or path.shape[1] != 3 or len(path) == 0:
        raise ValueError("path must be a non-empty list of 3-vectors")
    steps = np.linalg.norm(np.diff(path, axis=0), axis=1)
    if len(steps) and float(steps.max()) > MAX_PATH_STEP_M + 1e-12:
        raise ValueError(
            f"consecutive path points must be <= {MAX_PATH_STEP_M} m apart "
            f"(max gap {steps.max():.4g} m); densify the path first")
    q = np.asarray(seed, dtype=float)
    out = []
    for i, point in enumerate(path):
        try:
            q = solve_ik_position(chain, point, q, settings)
        except UnreachableError as exc:
            raise UnreachableError(exc.residual, index=i) from exc
        out.append(q)
    return out


def densify_path(points, max_step=0.001):
    """Linear interpolation so consecutive points are <= max_step apart."""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return points.copy()
    out = [points[0]]
    for a, b in zip(points[:-1], points[1:]):
        gap = float(np.linalg.norm(b - a))
        n = max(1, int(math.ceil(gap / max_step)))
        for k in range(1, n + 1):
            out.append(a + (b - a) * (k / n))
    return np.asarray(out)
