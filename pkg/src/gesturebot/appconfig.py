"""Text config file: one `key = value` per line, overriding named defaults.

Unknown keys are rejected with their line number.  The parsed overrides feed
the controller, envelope, sim, and training defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .control import ControllerConfig, SafetyEnvelope, parse_gesture_map
from .mlp import TrainConfig
from .pipeline import PipelineConfig
from .sim import SimConfig


class ConfigError(ValueError):
    pass


_KEYS = {
    "controller.confidence_threshold": float,
    "controller.debounce_frames": int,
    "controller.jog_speed": float,
    "controller.gesture_timeout_ms": float,
    "sim.dt": float,
    "sim.damping": float,
    "sim.payload_mass": float,
    "envelope.speed_fraction": float,
    "envelope.payload_cap_kg": float,
    "envelope.shoulder_lift_min_deg": float,
    "envelope.shoulder_lift_max_deg": float,
    "envelope.max_joint_speed": float,
    "train.learning_rate": float,
    "train.epochs": int,
    "train.batch_size": int,
    "features.scale_normalize": bool,
}


def _parse_value(kind, raw: str):
    if kind is bool:
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return kind(raw)


def parse_config_text(text: str) -> dict:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _parse_value(_KEYS[key], val)
        except ValueError as e:
            raise ConfigError(f"line {lineno}: {e}") from None
    return values


@dataclass
class AppConfig:
    overrides: dict = field(default_factory=dict)
    gesture_map_text: str | None = None

    @classmethod
    def load(cls, path: str | None, gesture_map_path: str | None = None) -> "AppConfig":
        overrides = {}
        if path:
            with open(path, "r", encoding="utf-8") as f:
                overrides = parse_config_text(f.read())
        gm = None
        if gesture_map_path:
            with open(gesture_map_path, "r", encoding="utf-8") as f:
                gm = f.read()
        return cls(overrides, gm)

    def get(self, key: str, default):
        return self.overrides.get(key, default)

    @property
    def scale_normalize(self) -> bool:
        return bool(self.get("features.scale_normalize", False))

    def envelope(self) -> SafetyEnvelope:
        env = SafetyEnvelope()
        limits = list(env.joint_limits_deg)
        lo = self.get("envelope.shoulder_lift_min_deg", limits[1][0])
        hi = self.get("envelope.shoulder_lift_max_deg", limits[1][1])
        limits[1] = (lo, hi)
        return SafetyEnvelope(
            joint_limits_deg=tuple(limits),
            speed_fraction=self.get("envelope.speed_fraction", env.speed_fraction),
            max_joint_speed=(self.get("envelope.max_joint_speed", np.pi),) * 6,
            payload_cap_kg=self.get("envelope.payload_cap_kg", env.payload_cap_kg),
        )

    def controller(self) -> ControllerConfig:
        base = ControllerConfig()
        gesture_map = (
            parse_gesture_map(self.gesture_map_text)
            if self.gesture_map_text is not None
            else dict(base.gesture_map)
        )
        return ControllerConfig(
            confidence_threshold=self.get("controller.confidence_threshold", base.confidence_threshold),
            debounce_frames=self.get("controller.debounce_frames", base.debounce_frames),
            jog_speed=self.get("controller.jog_speed", base.jog_speed),
            gesture_timeout_ms=self.get("controller.gesture_timeout_ms", base.gesture_timeout_ms),
            gesture_map=gesture_map,
        )

    def sim(self) -> SimConfig:
        base = SimConfig()
        return SimConfig(
            dt=self.get("sim.dt", base.dt),
            damping=self.get("sim.damping", base.damping),
            envelope=self.envelope(),
            payload_mass=self.get("sim.payload_mass", base.payload_mass),
        )

    def train(self, seed: int = 0) -> TrainConfig:
        base = TrainConfig()
        return TrainConfig(
            learning_rate=self.get("train.learning_rate", base.learning_rate),
            epochs=self.get("train.epochs", base.epochs),
            batch_size=self.get("train.batch_size", base.batch_size),
            seed=seed,
        )

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(controller=self.controller(), sim=self.sim())
