"""In-process pub-sub bus mirroring the four-node ROS-style graph.

Topics are fixed; delivery is FIFO per topic with bounded per-subscriber
queues (drop-oldest under backpressure, with a drop counter so
delivered + dropped == published always holds).  publish() is safe from any
thread; each subscription is meant to be drained by a single consumer.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Any, Optional

TOPICS = (
    "perception/landmarks",
    "perception/gesture",
    "controller/jog",
    "robot/state",
    "safety/events",
)

DEFAULT_QUEUE_SIZE = 64


class BusError(ValueError):
    pass


@dataclass(frozen=True)
class Envelope:
    topic: str
    seq: int
    stamp: float  # ms
    payload: Any


class Subscription:
    def __init__(self, topic: str, maxsize: int):
        self.topic = topic
        self.maxsize = maxsize
        self._queue: deque[Envelope] = deque()
        self._cond = threading.Condition()
        self.dropped = 0
        self.delivered = 0
        self._closed = False

    def _offer(self, env: Envelope) -> None:
        with self._cond:
            if len(self._queue) >= self.maxsize:
                self._queue.popleft()
                self.dropped += 1
            self._queue.append(env)
            self._cond.notify()

    def get(self, timeout: Optional[float] = None) -> Optional[Envelope]:
        """Next message, blocking up to `timeout` seconds; None on timeout/close."""
        with self._cond:
            if not self._queue:
                self._cond.wait(timeout)
            if not self._queue:
                return None
            env = self._queue.popleft()
            self.delivered += 1
            return env

    def drain(self) -> list[Envelope]:
        """All currently queued messages, non-blocking."""
        with self._cond:
            out = list(self._queue)
            self._queue.clear()
            self.delivered += len(out)
            return out

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()


class MessageBus:
    """Fixed-topic bus with per-topic sequence counters."""

    def __init__(self, schema: Optional[dict[str, type]] = None):
        self._lock = threading.Lock()
        self._seq = {t: 0 for t in TOPICS}
        self._published = {t: 0 for t in TOPICS}
        self._subs: dict[str, list[Subscription]] = {t: [] for t in TOPICS}
        self._schema = schema or {}

    def publish(self, topic: str, payload: Any, stamp: float = 0.0) -> int:
        if topic not in self._subs:
            raise BusError(f"unknown topic: {topic}")
        expected = self._schema.get(topic)
        if expected is not None and not isinstance(payload, expected):
            raise BusError(
                f"payload for {topic} must be {expected.__name__}, got {type(payload).__name__}"
            )
        with self._lock:
            self._seq[topic] += 1
            seq = self._seq[topic]
            self._published[topic] += 1
            subs = list(self._subs[topic])
        env = Envelope(topic, seq, stamp, payload)
        for sub in subs:
            sub._offer(env)
        return seq

    def subscribe(self, topic: str, maxsize: int = DEFAULT_QUEUE_SIZE) -> Subscription:
        if topic not in self._subs:
            raise BusError(f"unknown topic: {topic}")
        sub = Subscription(topic, maxsize)
        with self._lock:
            self._subs[topic].append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            try:
                self._subs[sub.topic].remove(sub)
            except ValueError:
                pass
        sub.close()

    def published_count(self, topic: str) -> int:
        with self._lock:
            return self._published[topic]
