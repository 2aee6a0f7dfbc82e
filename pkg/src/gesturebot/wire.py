"""Newline-delimited JSON wire protocol (proto 1).

Inbound:  hello, frame (21 landmark pairs), gesture_hold (classifier bypass).
Outbound: hello, gesture, jog, state, safety, error.
All messages are single-line UTF-8 JSON objects with a `type` field.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .landmarks import NUM_CLASSES, NUM_LANDMARKS, gesture_name

PROTO_VERSION = 1


class WireError(ValueError):
    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code


def hello_message() -> dict:
    return {"type": "hello", "proto": PROTO_VERSION}


def encode(msg: dict) -> bytes:
    return (json.dumps(msg, separators=(",", ":")) + "\n").encode("utf-8")


def parse_client_line(line: str) -> dict:
    """Validate one inbound line; raises WireError with a short error code."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError:
        raise WireError("bad_json") from None
    if not isinstance(msg, dict) or "type" not in msg:
        raise WireError("bad_message", "missing type")
    t = msg["type"]
    if t == "hello":
        if msg.get("proto") != PROTO_VERSION:
            raise WireError("proto_mismatch", f"server speaks proto {PROTO_VERSION}")
        return msg
    if t == "frame":
        pts = msg.get("pts")
        if not isinstance(pts, list) or len(pts) != NUM_LANDMARKS:
            raise WireError("bad_frame", f"need {NUM_LANDMARKS} points")
        for p in pts:
            # a z coordinate is tolerated and dropped; x/y must be numbers
            if (
                not isinstance(p, list)
                or len(p) not in (2, 3)
                or not all(isinstance(v, (int, float)) for v in p)
            ):
                raise WireError("bad_frame", "points must be [x,y] pairs")
        if not isinstance(msg.get("t"), (int, float)):
            raise WireError("bad_frame", "missing timestamp t")
        if msg.get("hand", "unknown") not in ("left", "right", "unknown"):
            raise WireError("bad_frame", "bad hand tag")
        return msg
    if t == "gesture_hold":
        label = msg.get("label")
        if not isinstance(label, int) or not 0 <= label < NUM_CLASSES:
            raise WireError("bad_gesture", "label must be 0-7")
        if not isinstance(msg.get("t"), (int, float)):
            raise WireError("bad_gesture", "missing timestamp t")
        return msg
    raise WireError("unknown_type", str(t))


def frame_points(msg: dict) -> np.ndarray:
    """(21, 2) array from a validated frame message, dropping any z."""
    return np.array([[p[0], p[1]] for p in msg["pts"]], dtype=np.float64)


def gesture_message(t: float, label: int, conf: float) -> dict:
    return {
        "type": "gesture",
        "t": t,
        "label": label,
        "name": gesture_name(label),
        "conf": conf,
    }


def no_gesture_message(t: float) -> dict:
    return {"type": "gesture", "t": t, "label": None, "name": None, "conf": 0.0}


def jog_message(t: float, v, grip: Any = None) -> dict:
    return {"type": "jog", "t": t, "v": [float(x) for x in v], "grip": grip}


def state_message(t: float, q, ee, rotation, grip: str) -> dict:
    return {
        "type": "state",
        "t": t,
        "q": [float(x) for x in q],
        "ee": [float(x) for x in ee],
        "R": [float(x) for x in np.asarray(rotation).reshape(9)],
        "grip": grip,
    }


def safety_message(t: float, reasons: list[str], clamped: bool) -> dict:
    return {"type": "safety", "t": t, "reasons": reasons, "clamped": clamped}


def error_message(code: str, detail: str = "") -> dict:
    return {"type": "error", "error": code, "detail": detail}
