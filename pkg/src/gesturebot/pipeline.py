"""The frame -> gesture -> jog -> state pipeline over the message bus.

One Pipeline owns the classifier, the controller state machine, and the sim,
and advances them together one tick at a time.  tick() takes an explicit
timestamp, so tests drive it from a virtual clock; live serving drives it from
a wall-clock thread at the sim rate.  All stage outputs are published on the
bus as wire-format dicts, which is also exactly what goes to socket clients.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import control, wire
from .bus import MessageBus
from .control import ControllerConfig, ControllerState, JogCommand
from .landmarks import LandmarkFrame, normalize_frame
from .sim import SimConfig, initial_state, step

Predictor = Callable[[np.ndarray], Optional[tuple[int, float]]]

STAGES = ("frame_to_gesture", "gesture_to_jog", "jog_to_state", "frame_to_jog")


class LatencyMonitor:
    """Per-stage wall-clock latency samples (ms) in bounded ring buffers."""

    def __init__(self, capacity: int = 4096):
        self.samples = {s: deque(maxlen=capacity) for s in STAGES}
        self.last_update = 0.0

    def record(self, stage: str, ms: float) -> None:
        self.samples[stage].append(ms)
        self.last_update = time.monotonic()

    def report(self, window: int) -> dict:
        if window < 1:
            raise ValueError("window must be >= 1")
        out: dict = {"window": window, "stale": time.monotonic() - self.last_update > 2.0}
        for stage, buf in self.samples.items():
            data = list(buf)[-window:]
            if not data:
                raise ValueError(f"no samples for stage {stage}")
            arr = np.asarray(data)
            out[stage] = {
                "p50": float(np.percentile(arr, 50)),
                "p99": float(np.percentile(arr, 99)),
                "max": float(arr.max()),
                "n": len(arr),
            }
        return out


@dataclass
class PipelineConfig:
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    sim: SimConfig = field(default_factory=SimConfig)


class Pipeline:
    def __init__(self, predictor: Predictor, config: Optional[PipelineConfig] = None):
        self.predictor = predictor
        self.config = config or PipelineConfig()
        self.bus = MessageBus(schema={t: dict for t in
                                      ("perception/landmarks", "perception/gesture",
                                       "controller/jog", "robot/state", "safety/events")})
        self.controller_state = ControllerState()
        self.sim_state = initial_state(self.config.sim)
        self.current_cmd = JogCommand((0.0, 0.0, 0.0))
        self.latency = LatencyMonitor()
        self._inbound: deque = deque()
        self._inbound_lock = threading.Lock()
        self._last_safety_key = None

    # --- client-facing input --------------------------------------------------

    def submit(self, msg: dict) -> None:
        """Queue a validated inbound frame/gesture_hold message."""
        with self._inbound_lock:
            self._inbound.append((msg, time.perf_counter()))

    # --- stepping -------------------------------------------------------------

    def tick(self, now_ms: float) -> None:
        """Process pending input, run the controller once per event (or once
        with no-gesture), then step the sim one dt and publish state."""
        with self._inbound_lock:
            pending = list(self._inbound)
            self._inbound.clear()

        events: list[Optional[tuple[int, float]]] = []
        for msg, recv_pc in pending:
            if msg["type"] == "frame":
                pts = wire.frame_points(msg)
                try:
                    frame = LandmarkFrame(timestamp=msg["t"], points=pts)
                    features = normalize_frame(frame)
                    result = self.predictor(features)
                except ValueError:
                    continue  # malformed frames were rejected at the wire already
                self.latency.record("frame_to_gesture", (time.perf_counter() - recv_pc) * 1e3)
                if result is None:
                    self.bus.publish("perception/gesture", wire.no_gesture_message(now_ms), now_ms)
                    events.append(None)
                else:
                    label, conf = result
                    self.bus.publish(
                        "perception/gesture", wire.gesture_message(now_ms, label, conf), now_ms
                    )
                    events.append((label, conf))
            elif msg["type"] == "gesture_hold":
                label = msg["label"]
                self.bus.publish(
                    "perception/gesture", wire.gesture_message(now_ms, label, 1.0), now_ms
                )
                events.append((label, 1.0))

        pc_ctrl = time.perf_counter()
        if events:
            cmds = [
                control.update(self.controller_state, ev, now_ms, self.config.controller)
                for ev in events
            ]
        else:
            # no fresh perception data this tick: keep emission/timeout running
            cmds = [control.idle(self.controller_state, now_ms, self.config.controller)]
        for cmd in cmds:
            if cmd is not None:
                self.current_cmd = cmd
                self.bus.publish(
                    "controller/jog",
                    wire.jog_message(now_ms, cmd.linear_velocity, cmd.gripper_action),
                    now_ms,
                )
        pc_after_ctrl = time.perf_counter()
        self.latency.record("gesture_to_jog", (pc_after_ctrl - pc_ctrl) * 1e3)
        for msg, recv_pc in pending:
            if msg["type"] == "frame":
                self.latency.record("frame_to_jog", (pc_after_ctrl - recv_pc) * 1e3)

        pc_sim = time.perf_counter()
        self.sim_state, verdict = step(self.sim_state, self.current_cmd, self.config.sim)
        if self.current_cmd.gripper_action is not None:
            # gripper actions are one-shot; do not re-apply on later ticks
            self.current_cmd = JogCommand(self.current_cmd.linear_velocity, stamp=now_ms)
        self.latency.record("jog_to_state", (time.perf_counter() - pc_sim) * 1e3)

        self.bus.publish(
            "robot/state",
            wire.state_message(
                now_ms,
                self.sim_state.q,
                self.sim_state.ee_position,
                self.sim_state.ee_rotation,
                self.sim_state.gripper,
            ),
            now_ms,
        )
        if verdict.reasons:
            key = (tuple(verdict.reasons), verdict.accepted)
            if key != self._last_safety_key:  # report each episode once, not every tick
                self.bus.publish(
                    "safety/events",
                    wire.safety_message(now_ms, verdict.reasons, verdict.clamped),
                    now_ms,
                )
            self._last_safety_key = key
        else:
            self._last_safety_key = None

    def measure_latency(self, window: int) -> dict:
        return self.latency.report(window)


class PipelineRunner:
    """Wall-clock thread driving Pipeline.tick at the sim rate."""

    def __init__(self, pipeline: Pipeline):
        self.pipeline = pipeline
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, name="pipeline", daemon=True)
        self._thread.start()

    def _run(self) -> None:
        dt = self.pipeline.config.sim.dt
        t0 = time.monotonic()
        n = 0
        while not self._stop.is_set():
            now_ms = (time.monotonic() - t0) * 1e3
            self.pipeline.tick(now_ms)
            n += 1
            target = t0 + n * dt
            delay = target - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
