"""Time-stepped stand-in for the UR5 arm and its driver.

Each step resolves the current Cartesian jog into joint velocities (damped
least squares), applies the safety envelope (speed cap, joint-limit
lookahead), integrates with explicit Euler, and re-derives the end-effector
pose from forward kinematics — the pose is never integrated independently.
Orientation is held during translational jog: the angular command is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .control import JogCommand, SafetyEnvelope, SafetyVerdict, validate_jog
from .kinematics import UR5_DH, DHTable, forward_kinematics, resolve_velocity

# mid-workspace start well inside the shoulder-lift limits
HOME_Q = (0.0, -np.pi / 2, np.pi / 2, -np.pi / 2, -np.pi / 2, 0.0)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01  # seconds
    damping: float = 0.05
    envelope: SafetyEnvelope = field(default_factory=SafetyEnvelope)
    dh: DHTable = UR5_DH
    payload_mass: float = 0.0

    def __post_init__(self):
        if self.dt <= 0 or self.damping <= 0:
            raise ValueError("dt and damping must be positive")


@dataclass
class SimState:
    q: np.ndarray
    qdot: np.ndarray
    ee_position: np.ndarray
    ee_rotation: np.ndarray
    gripper: str = "open"  # "open" | "closed"
    t: float = 0.0


def initial_state(config: SimConfig, q0=HOME_Q) -> SimState:
    q = np.asarray(q0, dtype=np.float64)
    pos, rot = forward_kinematics(q, config.dh)
    return SimState(q=q, qdot=np.zeros(6), ee_position=pos, ee_rotation=rot)


def step(state: SimState, cmd: JogCommand, config: SimConfig) -> tuple[SimState, SafetyVerdict]:
    """Advance one dt.  Returns the new state and the safety verdict for the
    command (payload / speed / joint-limit outcomes)."""
    if not (np.all(np.isfinite(state.q)) and np.all(np.isfinite(cmd.linear_velocity))):
        raise ValueError("non-finite state or command")

    def resolver(q, v):
        if not np.any(v):
            return np.zeros(6)
        return resolve_velocity(v, q, config.dh, config.damping)

    verdict, qdot = validate_jog(
        cmd, state.q, config.payload_mass, config.envelope, resolver, config.dt
    )
    q_new = state.q + qdot * config.dt
    # belt and braces: the lookahead already zeroed violating joints
    lims = np.radians(np.asarray(config.envelope.joint_limits_deg))
    q_new = np.clip(q_new, lims[:, 0], lims[:, 1])

    pos, rot = forward_kinematics(q_new, config.dh)
    gripper = state.gripper
    if cmd.gripper_action == "close":
        gripper = "closed"
    elif cmd.gripper_action == "open":
        gripper = "open"
    new_state = SimState(
        q=q_new,
        qdot=qdot,
        ee_position=pos,
        ee_rotation=rot,
        gripper=gripper,
        t=state.t + config.dt,
    )
    return new_state, verdict
