"""Point-to-point delivery scheduling with latency, jitter, and FIFO order."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .messages import EStopMsg, Message


@dataclass(frozen=True)
class LinkParams:
    latency_ms: float = 1.0
    jitter_ms: float = 0.0

    def __post_init__(self) -> None:
        if self.latency_ms < 0 or self.jitter_ms < 0:
            raise ValueError("latency and jitter must be non-negative")


def deliver(msg: Message, link: "Link", now_ms: float) -> float:
    """Scheduled delivery time.  Jitter never reorders a link: each delivery
    is clamped to at or after the previous one.  EStop rides the zero-latency
    safety lane and may overtake queued traffic."""
    if isinstance(msg, EStopMsg):
        return float(now_ms)
    delay = link.params.latency_ms
    if link.params.jitter_ms > 0:
        delay += float(link.rng.uniform(0.0, link.params.jitter_ms))
    at = now_ms + delay
    if at < link.last_delivery_ms:
        at = link.last_delivery_ms
    link.last_delivery_ms = at
    return float(at)


@dataclass
class Link:
    """One directed sender->receiver edge with its own jitter stream."""

    name: str
    params: LinkParams = field(default_factory=LinkParams)
    seed: int = 0
    last_delivery_ms: float = 0.0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        # crc32, not hash(): the jitter stream must be stable across processes
        self.rng = np.random.default_rng([self.seed, zlib.crc32(self.name.encode())])

    def schedule(self, msg: Message, now_ms: float) -> float:
        return deliver(msg, self, now_ms)
