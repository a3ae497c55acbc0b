"""Single-producer multi-consumer event fan-out with bounded buffers.

A slow subscriber loses the oldest records and sees a gap marker; publishing
never blocks the producer (diagnostics must not stall control).
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field


@dataclass
class Subscription:
    maxlen: int = 512
    _buf: deque = field(default_factory=deque)
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _ready: threading.Condition = field(init=False)
    _gap: bool = False
    closed: bool = False

    def __post_init__(self) -> None:
        self._ready = threading.Condition(self._lock)

    def push(self, record: dict) -> None:
        with self._lock:
            if len(self._buf) >= self.maxlen:
                self._buf.popleft()
                self._gap = True
            self._buf.append(record)
            self._ready.notify_all()

    def pop(self, timeout: float | None = None) -> dict | None:
        """Next record, a gap marker, or None on timeout/close."""
        with self._lock:
            if self._gap:
                self._gap = False
                return {"type": "gap", "note": "events dropped"}
            if not self._buf:
                self._ready.wait(timeout)
            if self._gap:
                self._gap = False
                return {"type": "gap", "note": "events dropped"}
            if self._buf:
                return self._buf.popleft()
            return None

    def close(self) -> None:
        with self._lock:
            self.closed = True
            self._ready.notify_all()


class EventBroadcaster:
    def __init__(self, buffer_size: int = 512):
        self._subs: list[Subscription] = []
        self._lock = threading.Lock()
        self.buffer_size = buffer_size

    def subscribe(self) -> Subscription:
        sub = Subscription(maxlen=self.buffer_size)
        with self._lock:
            self._subs.append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        sub.close()
        with self._lock:
            if sub in self._subs:
                self._subs.remove(sub)

    def publish(self, record: dict) -> None:
        with self._lock:
            subs = list(self._subs)
        for sub in subs:
            sub.push(record)
