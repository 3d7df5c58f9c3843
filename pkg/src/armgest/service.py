"""Live session service: receive a traced stroke over a WebSocket, map
it onto the arm's writing plane, follow it with IK while streaming joint
states back, and classify the finished stroke with a loaded model.

The classification path (StrokeEngine) is plain library code shared with
the offline CLI, so a logged live stroke replayed offline produces the
identical label and vote vector.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .dataset import HOME_Q, WRITING_ORIGIN_BASE
from .features import extract_features
from .forest import RandomForestModel, predict
from .gestures import GestureClass, plane_axes
from .kinematics import (KinematicChain, UnreachableError, densify_path,
                         follow_path, load_default_chain)
from .telemetry import DEFAULT_SAMPLE_RATE_HZ, Recording, sample_trajectory

PLANE_SIZE_M = 0.4
STROKE_STEP_M = 0.04  # densification gap for incoming stroke segments
LIVE_EFFORT_SEED = 0  # fixed so live and offline replays agree exactly
GRASP_SAMPLE_MS = 20.0
EFFECTORS = ("knob", "hand")


class TooShortError(ValueError):
    """Stroke has fewer than two points or spans no usable time."""


class StrokeError(ValueError):
    """Malformed stroke input (range, ordering, unknown fields)."""


def map_canvas_to_plane(u, v, origin, plane_tilt=0.0):
    """Affine map from normalized canvas coordinates onto a vertical
    PLANE_SIZE_M square centered at `origin`; v = 0 is the top edge."""
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise StrokeError(f"canvas point ({u}, {v}) outside [0, 1]^2")
    e_h, _, e_v = plane_axes(plane_tilt)
    return (np.asarray(origin, dtype=float)
            + (u - 0.5) * PLANE_SIZE_M * e_h
            + (0.5 - v) * PLANE_SIZE_M * e_v)


def default_writing_origin(chain: KinematicChain):
    return WRITING_ORIGIN_BASE + np.array([0.0, 0.0, chain.base_height])


def grasp_cycle_points(t0_ms, amplitude, period_ms, cycles):
    """Canvas-point samples for a vertical oscillation: the grasp-mode
    stand-in for handshake gestures that a flat canvas cannot express."""
    if not 0.0 < amplitude <= PLANE_SIZE_M / 2:
        raise StrokeError("amplitude must be in (0, 0.2] meters")
    if period_ms < 2 * GRASP_SAMPLE_MS or cycles < 1:
        raise StrokeError("period_ms must be >= 40 and cycles >= 1")
    n = int(round(cycles * period_ms / GRASP_SAMPLE_MS))
    points = []
    for k in range(n + 1):
        dt = k * GRASP_SAMPLE_MS
        v = 0.5 + (amplitude / PLANE_SIZE_M) * math.sin(
            2.0 * math.pi * dt / period_ms)
        points.append((t0_ms + dt, 0.5, v))
    return points


class StrokeEngine:
    """Incremental stroke-to-recording pipeline.

    Feed timestamped canvas points; each call returns the newly solved
    (t_ms, joint-vector) waypoints.  finish() resamples the accumulated
    trajectory on the client clock and returns a Recording.
    """

    def __init__(self, chain=None, origin=None, plane_tilt=0.0,
                 rate=DEFAULT_SAMPLE_RATE_HZ, start_q=None):
        self.chain = chain if chain is not None else load_default_chain()
        self.origin = (np.asarray(origin, dtype=float) if origin is not None
                       else default_writing_origin(self.chain))
        self.plane_tilt = plane_tilt
        self.rate = rate
        self.start_q = (np.asarray(start_q, dtype=float)
                        if start_q is not None else HOME_Q.copy())
        self.reset()

    def reset(self):
        self._point_count = 0
        self._last_t_ms = None
        self._last_p = None
        self._t_ms = []
        self._q = []

    @property
    def last_t_ms(self):
        return self._last_t_ms

    def add_point(self, t_ms, u, v):
        if self._last_t_ms is not None and t_ms < self._last_t_ms:
            raise StrokeError(
                f"timestamps must be non-decreasing ({t_ms} after "
                f"{self._last_t_ms})")
        p = map_canvas_to_plane(u, v, self.origin, self.plane_tilt)
        if self._last_p is None:
            segment = np.asarray([p])
            times = np.asarray([float(t_ms)])
            seed = self.start_q
        else:
            segment = densify_path([self._last_p, p],
                                   max_step=STROKE_STEP_M)[1:]
            frac = np.linspace(0.0, 1.0, len(segment) + 1)[1:]
            times = self._last_t_ms + frac * (t_ms - self._last_t_ms)
            seed = self._q[-1]
        joints = follow_path(self.chain, segment, seed)
        self._t_ms.extend(float(t) for t in times)
        self._q.extend(joints)
        self._last_t_ms = float(t_ms)
        self._last_p = p
        self._point_count += 1
        return list(zip(times.tolist(), joints))

    def finish(self) -> Recording:
        if self._point_count < 2:
            raise TooShortError("a stroke needs at least 2 points")
        times_s = (np.asarray(self._t_ms) - self._t_ms[0]) / 1000.0
        effort_rng = np.random.default_rng(
            np.random.SeedSequence([LIVE_EFFORT_SEED]))
        try:
            t, q, dq, tau = sample_trajectory(
                times_s, np.asarray(self._q), rate=self.rate,
                effort_rng=effort_rng)
        except ValueError as exc:
            raise TooShortError(str(exc)) from exc
        # the label is unknown until classification; LS is a placeholder
        recording = Recording(t=t, q=q, dq=dq, tau=tau,
                              gesture=GestureClass.LS,
                              participant_id=0, trial_index=0)
        self.reset()
        return recording


def classify_stroke(points, model: RandomForestModel, chain=None,
                    origin=None, plane_tilt=0.0):
    """Offline counterpart of the live loop: run (t_ms, u, v) points
    through the same engine and classifier.  Returns (recording,
    prediction)."""
    engine = StrokeEngine(chain=chain, origin=origin, plane_tilt=plane_tilt)
    for t_ms, u, v in points:
        engine.add_point(t_ms, u, v)
    recording = engine.finish()
    prediction = predict(model, extract_features(recording))
    return recording, prediction


def read_stroke_log(path):
    """Parse a stroke log CSV with header t_ms,u,v."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "t_ms,u,v":
            raise StrokeError(f"{path}: expected header t_ms,u,v")
        points = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.strip().split(",")
            if len(parts) != 3:
                raise StrokeError(f"{path}:{lineno}: expected 3 columns")
            try:
                points.append(tuple(float(x) for x in parts))
            except ValueError as exc:
                raise StrokeError(f"{path}:{lineno}: {exc}") from exc
    return points


def write_stroke_log(points, path):
    lines = ["t_ms,u,v"]
    lines += [f"{t_ms:.6g},{u:.6g},{v:.6g}" for t_ms, u, v in points]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# -- HTTP / WebSocket wiring -------------------------------------------------

def create_app(model: RandomForestModel, chain=None, static_dir=None):
    """FastAPI application exposing /healthz, /model/info and the /ws
    session socket; optionally serves a static frontend at /."""
    chain = chain if chain is not None else load_default_chain()
    app = FastAPI()

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/model/info")
    def model_info():
        return {
            "class_labels": model.class_labels,
            "n_trees": model.config.n_trees,
            "feature_count": model.feature_count,
            "chain": chain.to_dict(),
            "home_q": HOME_Q.tolist(),
            "writing_origin": default_writing_origin(chain).tolist(),
            "plane_size_m": PLANE_SIZE_M,
        }

    @app.websocket("/ws")
    async def ws(socket: WebSocket):
        await socket.accept()
        engine = StrokeEngine(chain=chain)
        effector = None

        async def send_error(code, message):
            await socket.send_json(
                {"type": "error", "code": code, "message": message})

        async def stream_points(points):
            for t_ms, u, v in points:
                for wp_t, wp_q in engine.add_point(t_ms, u, v):
                    await socket.send_json({
                        "type": "arm_state", "t_ms": wp_t,
                        "q": [float(x) for x in wp_q]})

        try:
            while True:
                msg = await socket.receive_json()
                kind = msg.get("type")
                try:
                    if kind == "hello":
                        if msg.get("effector") not in EFFECTORS:
                            raise StrokeError(
                                f"effector must be one of {EFFECTORS}")
                        effector = msg["effector"]
                    elif effector is None:
                        await send_error("NoHello",
                                         "send a hello message first")
                    elif kind == "point":
                        await stream_points(
                            [(float(msg["t_ms"]), float(msg["u"]),
                              float(msg["v"]))])
                    elif kind == "grasp_cycle":
                        t0 = engine.last_t_ms or 0.0
                        await stream_points(grasp_cycle_points(
                            t0, float(msg["amplitude"]),
                            float(msg["period_ms"]), int(msg["cycles"])))
                    elif kind == "end":
                        recording = engine.finish()
                        pred = predict(model, extract_features(recording))
                        from .telemetry import duration, max_displacement
                        await socket.send_json({
                            "type": "prediction",
                            "label": pred.label,
                            "votes": pred.votes.tolist(),
                            "duration_s": duration(recording),
                            "max_displacement_m":
                                max_displacement(recording, chain),
                        })
                    else:
                        await send_error("BadMessage",
                                         f"unknown message type {kind!r}")
                except TooShortError as exc:
                    engine.reset()
                    await send_error("TooShort", str(exc))
                except (StrokeError, KeyError, TypeError, ValueError) as exc:
                    await send_error("BadMessage", str(exc))
                except UnreachableError as exc:
                    engine.reset()
                    await send_error("IKFailure", str(exc))
        except WebSocketDisconnect:
            pass

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="frontend")

    return app
