"""Deterministic discrete-event scheduler over a simulated millisecond clock."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable


@dataclass(order=True)
class _Entry:
    at_ms: float
    seq: int
    fn: Callable[[], None] = field(compare=False)


class Scheduler:
    """Priority queue of callbacks; ties run in insertion order."""

    def __init__(self) -> None:
        self._queue: list[_Entry] = []
        self._seq = 0
        self.now_ms: float = 0.0

    def at(self, at_ms: float, fn: Callable[[], None]) -> None:
        if at_ms < self.now_ms:
            at_ms = self.now_ms
        self._seq += 1
        heapq.heappush(self._queue, _Entry(at_ms=at_ms, seq=self._seq, fn=fn))

    def after(self, delay_ms: float, fn: Callable[[], None]) -> None:
        self.at(self.now_ms + max(0.0, delay_ms), fn)

    def empty(self) -> bool:
        return not self._queue

    def next_time(self) -> float | None:
        return self._queue[0].at_ms if self._queue else None

    def step(self) -> bool:
        """Run the next callback, advancing the clock.  False when drained."""
        if not self._queue:
            return False
        entry = heapq.heappop(self._queue)
        self.now_ms = entry.at_ms
        entry.fn()
        return True

    def run_until(self, predicate: Callable[[], bool], limit_ms: float) -> None:
        while not predicate():
            if self.now_ms > limit_ms:
                raise TimeoutError(f"simulation exceeded {limit_ms} ms")
            if not self.step():
                return
