"""Gesture-to-command controller and safety envelope.

Turns a stream of classified gesture events into debounced jog / gripper
commands: a label must persist for N consecutive frames before it takes
effect, an active jog re-emits every tick, and silence past the timeout emits
a single stop.  The safety layer combines per-joint angle limits (shoulder
lift restricted to [-183, -13] degrees), a global 20% joint-speed cap, and a
1 kg payload cap, applied in the order payload -> speed -> joint limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .landmarks import NUM_CLASSES, gesture_name

AXES = ("x", "y", "z")
SHOULDER_LIFT = 1  # joint index with the restricted range


class ControlError(ValueError):
    pass


@dataclass(frozen=True)
class CommandIntent:
    """jog(axis, direction), gripper(open|close), or none."""

    kind: str  # "jog" | "gripper" | "none"
    axis: Optional[str] = None
    direction: int = 0
    gripper: Optional[str] = None  # "open" | "close"

    def __post_init__(self):
        if self.kind == "jog":
            if self.axis not in AXES or self.direction not in (-1, 1):
                raise ControlError(f"bad jog intent: {self.axis} {self.direction}")
        elif self.kind == "gripper":
            if self.gripper not in ("open", "close"):
                raise ControlError(f"bad gripper intent: {self.gripper}")
        elif self.kind != "none":
            raise ControlError(f"bad intent kind: {self.kind}")


NONE_INTENT = CommandIntent("none")

DEFAULT_GESTURE_MAP: dict[int, CommandIntent] = {
    0: CommandIntent("gripper", gripper="close"),  # Fist
    1: CommandIntent("gripper", gripper="open"),  # OpenPalm
    2: CommandIntent("jog", "z", 1),  # PointUp
    3: CommandIntent("jog", "z", -1),  # PointDown
    4: CommandIntent("jog", "y", -1),  # PointLeft
    5: CommandIntent("jog", "y", 1),  # PointRight
    6: CommandIntent("jog", "x", -1),  # Peace
    7: CommandIntent("jog", "x", 1),  # ThumbUp
}


def parse_gesture_map(text: str) -> dict[int, CommandIntent]:
    """Parse the `label_id = intent` config format, e.g. `2 = jog z +`
    or `0 = gripper close`.  Unlisted labels keep the default binding."""
    table = dict(DEFAULT_GESTURE_MAP)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ControlError(f"line {lineno}: expected `label_id = intent`")
        left, right = (s.strip() for s in line.split("=", 1))
        try:
            label = int(left)
        except ValueError:
            raise ControlError(f"line {lineno}: bad label id {left!r}") from None
        if not 0 <= label < NUM_CLASSES:
            raise ControlError(f"line {lineno}: label id {label} out of range")
        parts = right.split()
        try:
            if parts[0] == "jog" and len(parts) == 3:
                intent = CommandIntent("jog", parts[1], {"+": 1, "-": -1}[parts[2]])
            elif parts[0] == "gripper" and len(parts) == 2:
                intent = CommandIntent("gripper", gripper=parts[1])
            elif parts == ["none"]:
                intent = NONE_INTENT
            else:
                raise KeyError
        except (KeyError, IndexError, ControlError):
            raise ControlError(f"line {lineno}: bad intent {right!r}") from None
        table[label] = intent
    return table


@dataclass(frozen=True)
class ControllerConfig:
    confidence_threshold: float = 0.8
    debounce_frames: int = 3
    jog_speed: float = 0.05  # m/s
    gesture_timeout_ms: float = 300.0
    gesture_map: dict[int, CommandIntent] = field(
        default_factory=lambda: dict(DEFAULT_GESTURE_MAP)
    )

    def __post_init__(self):
        if self.debounce_frames < 1 or self.jog_speed <= 0 or self.gesture_timeout_ms <= 0:
            raise ControlError("invalid controller config")
        if set(self.gesture_map) != set(range(NUM_CLASSES)):
            raise ControlError("gesture map must cover all 8 labels")

    def describe_map(self) -> str:
        lines = []
        for label in range(NUM_CLASSES):
            intent = self.gesture_map[label]
            if intent.kind == "jog":
                desc = f"jog {intent.axis} {'+' if intent.direction > 0 else '-'}"
            elif intent.kind == "gripper":
                desc = f"gripper {intent.gripper}"
            else:
                desc = "none"
            lines.append(f"  {label} {gesture_name(label):10s} -> {desc}")
        return "\n".join(lines)


def map_gesture(label: int, config: ControllerConfig) -> CommandIntent:
    if not 0 <= label < NUM_CLASSES:
        raise ControlError(f"label out of range: {label}")
    return config.gesture_map[label]


@dataclass(frozen=True)
class JogCommand:
    """Constant-magnitude Cartesian velocity in the robot base frame, plus an
    optional one-shot gripper action."""

    linear_velocity: tuple[float, float, float]
    gripper_action: Optional[str] = None
    stamp: float = 0.0

    @property
    def is_stop(self) -> bool:
        return self.linear_velocity == (0.0, 0.0, 0.0) and self.gripper_action is None


def _jog_velocity(intent: CommandIntent, speed: float) -> tuple[float, float, float]:
    v = [0.0, 0.0, 0.0]
    v[AXES.index(intent.axis)] = intent.direction * speed
    return tuple(v)


@dataclass
class ControllerState:
    active: CommandIntent = NONE_INTENT
    candidate_label: Optional[int] = None
    candidate_count: int = 0
    last_event_time: float = float("-inf")
    last_now: float = float("-inf")
    gripper: str = "open"


def update(
    state: ControllerState,
    event: Optional[tuple[int, float]],
    now: float,
    config: ControllerConfig,
) -> Optional[JogCommand]:
    """Advance the state machine by one tick; mutates `state` in place.

    `event` is (label, confidence) or None.  Returns the command emitted this
    tick, if any: a jog while a jog intent is active, a single gripper action
    on activation, or a single zero-velocity stop when the timeout fires.
    """
    if now < state.last_now:
        raise ControlError(f"time regression: {now} < {state.last_now}")
    state.last_now = now

    if event is not None and event[1] < config.confidence_threshold:
        event = None  # low confidence counts as no gesture

    emitted: Optional[JogCommand] = None
    if event is not None:
        label = event[0]
        state.last_event_time = now
        if label == state.candidate_label:
            state.candidate_count = min(state.candidate_count + 1, config.debounce_frames)
        else:
            state.candidate_label = label
            state.candidate_count = 1
        if state.candidate_count >= config.debounce_frames:
            intent = map_gesture(label, config)
            if intent != state.active:
                state.active = intent
                if intent.kind == "gripper":
                    state.gripper = "closed" if intent.gripper == "close" else "open"
                    emitted = JogCommand((0.0, 0.0, 0.0), gripper_action=intent.gripper, stamp=now)
    else:
        state.candidate_label = None
        state.candidate_count = 0
        if (
            state.active != NONE_INTENT
            and now - state.last_event_time > config.gesture_timeout_ms
        ):
            state.active = NONE_INTENT
            return JogCommand((0.0, 0.0, 0.0), stamp=now)  # single stop per episode

    if emitted is None and state.active.kind == "jog":
        emitted = JogCommand(_jog_velocity(state.active, config.jog_speed), stamp=now)
    return emitted


def idle(state: ControllerState, now: float, config: ControllerConfig) -> Optional[JogCommand]:
    """Tick with no perception observation (the sim runs faster than frames
    arrive): keeps continuous jog emission and timeout detection alive without
    touching the debounce counter."""
    if now < state.last_now:
        raise ControlError(f"time regression: {now} < {state.last_now}")
    state.last_now = now
    if state.active != NONE_INTENT and now - state.last_event_time > config.gesture_timeout_ms:
        state.active = NONE_INTENT
        state.candidate_label = None
        state.candidate_count = 0
        return JogCommand((0.0, 0.0, 0.0), stamp=now)
    if state.active.kind == "jog":
        return JogCommand(_jog_velocity(state.active, config.jog_speed), stamp=now)
    return None


# --- safety envelope ---------------------------------------------------------


@dataclass(frozen=True)
class SafetyEnvelope:
    joint_limits_deg: tuple[tuple[float, float], ...] = (
        (-360.0, 360.0),
        (-183.0, -13.0),  # shoulder lift
        (-360.0, 360.0),
        (-360.0, 360.0),
        (-360.0, 360.0),
        (-360.0, 360.0),
    )
    speed_fraction: float = 0.20
    max_joint_speed: tuple[float, ...] = (np.pi,) * 6  # rad/s
    payload_cap_kg: float = 1.0

    def __post_init__(self):
        if len(self.joint_limits_deg) != 6 or len(self.max_joint_speed) != 6:
            raise ControlError("envelope needs 6 joints")
        if any(lo >= hi for lo, hi in self.joint_limits_deg):
            raise ControlError("joint limit min must be < max")
        if not 0 < self.speed_fraction <= 1 or self.payload_cap_kg <= 0:
            raise ControlError("bad envelope parameters")

    def speed_caps(self) -> np.ndarray:
        return self.speed_fraction * np.asarray(self.max_joint_speed)


@dataclass
class SafetyVerdict:
    accepted: bool
    clamped: bool
    reasons: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.accepted and not self.reasons:
            raise ControlError("rejected verdict needs reasons")


def clamp_joint_targets(q_deg: np.ndarray, envelope: SafetyEnvelope) -> tuple[np.ndarray, bool]:
    """Clamp joint angles (degrees) into the envelope limits."""
    q_deg = np.asarray(q_deg, dtype=np.float64)
    lims = np.asarray(envelope.joint_limits_deg)
    out = np.clip(q_deg, lims[:, 0], lims[:, 1])
    return out, bool(np.any(out != q_deg))


def scale_joint_speed(qdot: np.ndarray, envelope: SafetyEnvelope) -> np.ndarray:
    """Uniformly scale the whole joint-velocity vector so the worst joint sits
    exactly at its speed cap; direction is preserved."""
    qdot = np.asarray(qdot, dtype=np.float64)
    caps = envelope.speed_caps()
    ratio = float(np.max(np.abs(qdot) / caps))
    if ratio > 1.0:
        return qdot / ratio
    return qdot.copy()


def check_payload(mass_kg: float, envelope: SafetyEnvelope) -> SafetyVerdict:
    if mass_kg < 0:
        raise ControlError("negative payload mass")
    if mass_kg <= envelope.payload_cap_kg:  # cap is inclusive
        return SafetyVerdict(True, False)
    return SafetyVerdict(False, False, ["payload"])


def validate_jog(
    cmd: JogCommand,
    current_q: np.ndarray,
    payload_mass: float,
    envelope: SafetyEnvelope,
    resolver: Callable[[np.ndarray, np.ndarray], np.ndarray],
    dt: float,
) -> tuple[SafetyVerdict, np.ndarray]:
    """Full safety pipeline for one command: payload check, Cartesian-to-joint
    resolution via `resolver`, speed scaling, and a one-step joint-limit
    lookahead (q + qdot*dt); limit-violating joints get their motion zeroed.

    Returns the verdict and the safe joint velocity (zeros on rejection).
    """
    current_q = np.asarray(current_q, dtype=np.float64)
    verdict = check_payload(payload_mass, envelope)
    if not verdict.accepted:
        return verdict, np.zeros(6)

    qdot = np.asarray(resolver(current_q, np.asarray(cmd.linear_velocity)), dtype=np.float64)
    reasons = []
    scaled = scale_joint_speed(qdot, envelope)
    if not np.array_equal(scaled, qdot):
        reasons.append("speed_limit")
    qdot = scaled

    q_next_deg = np.degrees(current_q + qdot * dt)
    _, would_clamp = clamp_joint_targets(q_next_deg, envelope)
    if would_clamp:
        lims = np.asarray(envelope.joint_limits_deg)
        offending = (q_next_deg < lims[:, 0]) | (q_next_deg > lims[:, 1])
        qdot = qdot.copy()
        qdot[offending] = 0.0
        reasons.append("joint_limit")
    return SafetyVerdict(True, bool(reasons), reasons), qdot
