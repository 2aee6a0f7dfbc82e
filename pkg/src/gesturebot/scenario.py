"""Scripted headless runs: a timed gesture schedule drives the full pipeline
under a virtual clock, and the logged trajectory is audited afterwards.

A script is a list of (t_ms, label) entries; each entry holds its gesture (as
confidence-1.0 events at ~30 fps) until the next entry's time, label None
meaning hands off.  The verdict checks per-phase end-effector displacement for
jog gestures, gripper action ordering, and replays the global safety
invariants over the log.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .control import SHOULDER_LIFT
from .pipeline import Pipeline, PipelineConfig

FRAME_INTERVAL_MS = 1000.0 / 30.0
AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


class ScenarioError(ValueError):
    pass


@dataclass
class ScenarioScript:
    entries: list[tuple[float, Optional[int]]]
    end_ms: float

    def __post_init__(self):
        times = [t for t, _ in self.entries]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ScenarioError("script times must be non-decreasing")
        if self.entries and self.end_ms < self.entries[-1][0]:
            raise ScenarioError("end_ms before last entry")

    def label_at(self, t_ms: float) -> Optional[int]:
        label = None
        for t, lab in self.entries:
            if t <= t_ms:
                label = lab
            else:
                break
        return label


def pick_and_place_script() -> ScenarioScript:
    """Jog along +x, close the gripper, lift along +z, open the gripper."""
    return ScenarioScript(
        entries=[
            (0.0, 7),  # ThumbUp: jog x+
            (1500.0, 0),  # Fist: gripper close
            (2100.0, 2),  # PointUp: jog z+
            (3600.0, 1),  # OpenPalm: gripper open
            (4200.0, None),
        ],
        end_ms=4800.0,
    )


def limit_seeking_script(duration_ms: float = 60000.0) -> ScenarioScript:
    """Sustained downward jog until a joint limit has to engage."""
    return ScenarioScript(entries=[(0.0, 3)], end_ms=duration_ms)  # PointDown: jog z-


@dataclass
class ScenarioResult:
    success: bool
    phases: list[dict]
    gripper_ok: bool
    expected_grips: list[str]
    observed_grips: list[str]
    safety_events: list[dict]
    violations: int
    states: list[dict] = field(repr=False, default_factory=list)

    def as_dict(self, include_states: bool = False) -> dict:
        out = {
            "success": self.success,
            "phases": self.phases,
            "gripper_ok": self.gripper_ok,
            "expected_grips": self.expected_grips,
            "observed_grips": self.observed_grips,
            "safety_events": self.safety_events,
            "violations": self.violations,
        }
        if include_states:
            out["states"] = self.states
        return out


def audit_log(states: list[dict], config: PipelineConfig) -> int:
    """Count safety-invariant violations in a logged trajectory: shoulder-lift
    outside its angle range, or any joint's step-to-step speed above its cap."""
    env = config.sim.envelope
    lo, hi = env.joint_limits_deg[SHOULDER_LIFT]
    caps = env.speed_caps()
    dt = config.sim.dt
    violations = 0
    prev_q = None
    for msg in states:
        q = np.asarray(msg["q"])
        sl_deg = np.degrees(q[SHOULDER_LIFT])
        if sl_deg < lo - 1e-9 or sl_deg > hi + 1e-9:
            violations += 1
        if prev_q is not None:
            speed = np.abs(q - prev_q) / dt
            if np.any(speed > caps + 1e-9):
                violations += 1
        prev_q = q
    return violations


def run_scenario(
    script: ScenarioScript,
    config: Optional[PipelineConfig] = None,
    min_jog_displacement: float = 0.005,
) -> ScenarioResult:
    """Drive the pipeline with the script under a virtual clock and audit it."""
    config = config or PipelineConfig()
    pipeline = Pipeline(lambda features: None, config)
    state_sub = pipeline.bus.subscribe("robot/state", maxsize=1 << 22)
    safety_sub = pipeline.bus.subscribe("safety/events", maxsize=1 << 22)

    dt_ms = config.sim.dt * 1e3
    next_frame = 0.0
    n_ticks = int(round(script.end_ms / dt_ms))
    for n in range(n_ticks):
        now = n * dt_ms
        if now >= next_frame:
            label = script.label_at(now)
            if label is not None:
                pipeline.submit({"type": "gesture_hold", "label": label, "t": now})
            next_frame += FRAME_INTERVAL_MS
        pipeline.tick(now)

    states = [env.payload for env in state_sub.drain()]
    safety_events = [env.payload for env in safety_sub.drain()]

    gmap = config.controller.gesture_map
    phases = []
    expected_grips = []
    bounds = list(script.entries) + [(script.end_ms, None)]
    for (t0, label), (t1, _) in zip(bounds, bounds[1:]):
        if label is None:
            continue
        intent = gmap[label]
        if intent.kind == "gripper":
            expected_grips.append(intent.gripper)
            continue
        if intent.kind != "jog" or t1 - t0 < 500.0:
            continue
        span = [s for s in states if t0 <= s["t"] < t1]
        if len(span) < 2:
            phases.append({"t0": t0, "t1": t1, "ok": False, "reason": "no trajectory"})
            continue
        axis = AXIS_INDEX[intent.axis]
        disp = span[-1]["ee"][axis] - span[0]["ee"][axis]
        ok = disp * intent.direction >= min_jog_displacement
        phases.append(
            {"t0": t0, "t1": t1, "axis": intent.axis, "direction": intent.direction,
             "displacement": disp, "ok": bool(ok)}
        )

    observed_grips = []
    for s in states:
        grip = "close" if s["grip"] == "closed" else "open"
        if not observed_grips or observed_grips[-1] != grip:
            observed_grips.append(grip)
    # the arm starts open; only transitions count against the expectation
    transitions = observed_grips[1:]
    gripper_ok = transitions == expected_grips

    violations = audit_log(states, config)
    success = (
        all(p.get("ok") for p in phases)
        and gripper_ok
        and violations == 0
        and not any(not e.get("clamped", True) for e in safety_events)
    )
    return ScenarioResult(
        success=success,
        phases=phases,
        gripper_ok=gripper_ok,
        expected_grips=expected_grips,
        observed_grips=transitions,
        safety_events=safety_events,
        violations=violations,
        states=states,
    )
