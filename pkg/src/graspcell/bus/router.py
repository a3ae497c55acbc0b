"""Bus router: named endpoints, per-edge links, capture, heartbeat watch.

The router is passive with respect to time: send() schedules a delivery and
the simulation loop pops deliveries as its clock advances.  Every frame
crosses the wire format for real (encode on send, decode on delivery), so a
capture file replays exactly what the components exchanged.
"""

from __future__ import annotations

import heapq
import struct
from dataclasses import dataclass, field
from pathlib import Path

from .codec import decode_frame, encode_frame
from .link import Link, LinkParams
from .messages import EStopMsg, Message

HEARTBEAT_PERIOD_MS = 250.0
HEARTBEAT_GAP_PERIODS = 3

_TS = struct.Struct(">Q")


class BusDumpWriter:
    """Replayable capture: 8-byte big-endian ms timestamp before each frame."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("wb")

    def write(self, ts_ms: float, frame: bytes) -> None:
        self._fh.write(_TS.pack(int(ts_ms)))
        self._fh.write(frame)

    def close(self) -> None:
        self._fh.close()


def read_busdump(path: str | Path) -> list[tuple[int, Message, int]]:
    """Decode a capture file into (timestamp_ms, message, seq) records."""
    data = Path(path).read_bytes()
    out: list[tuple[int, Message, int]] = []
    pos = 0
    while pos < len(data):
        if len(data) - pos < _TS.size:
            raise ValueError("truncated capture: partial timestamp")
        (ts,) = _TS.unpack_from(data, pos)
        pos += _TS.size
        msg, seq, consumed = decode_frame(data[pos:])
        pos += consumed
        out.append((ts, msg, seq))
    return out


@dataclass
class Endpoint:
    name: str
    next_seq: int = 0

    def take_seq(self) -> int:
        seq = self.next_seq
        self.next_seq += 1
        return seq


@dataclass(order=True)
class _Delivery:
    at_ms: float
    order: int
    receiver: str = field(compare=False)
    sender: str = field(compare=False)
    msg: Message = field(compare=False)
    seq: int = field(compare=False)


class BusRouter:
    def __init__(self, seed: int = 0, default_params: LinkParams | None = None,
                 capture_path: str | Path | None = None):
        self.seed = seed
        self.default_params = default_params or LinkParams()
        self._endpoints: dict[str, Endpoint] = {}
        self._links: dict[tuple[str, str], Link] = {}
        self._queue: list[_Delivery] = []
        self._order = 0
        self._capture = BusDumpWriter(capture_path) if capture_path else None
        self._last_heard: dict[str, float] = {}
        self._watched: set[str] = set()
        self._reported_silent: set[str] = set()

    def endpoint(self, name: str) -> Endpoint:
        if name not in self._endpoints:
            self._endpoints[name] = Endpoint(name=name)
        return self._endpoints[name]

    def link(self, sender: str, receiver: str, params: LinkParams | None = None) -> Link:
        key = (sender, receiver)
        if key not in self._links:
            self._links[key] = Link(name=f"{sender}->{receiver}",
                                    params=params or self.default_params, seed=self.seed)
        return self._links[key]

    def watch_heartbeat(self, name: str) -> None:
        self._watched.add(name)

    def send(self, sender: str, receiver: str, msg: Message, now_ms: float) -> float:
        """Encode, capture, and schedule; returns the delivery time."""
        seq = self.endpoint(sender).take_seq()
        frame = encode_frame(msg, seq=seq)
        if self._capture is not None:
            self._capture.write(now_ms, frame)
        decoded, seq2, _ = decode_frame(frame)  # the wire is the interface
        at = self.link(sender, receiver).schedule(decoded, now_ms)
        self._order += 1
        heapq.heappush(self._queue, _Delivery(at_ms=at, order=self._order,
                                              receiver=receiver, sender=sender,
                                              msg=decoded, seq=seq2))
        self._last_heard[sender] = now_ms
        self._reported_silent.discard(sender)
        return at

    def broadcast_estop(self, sender: str, receivers: list[str], now_ms: float) -> None:
        for r in receivers:
            self.send(sender, r, EStopMsg(), now_ms)

    def next_delivery_ms(self) -> float | None:
        return self._queue[0].at_ms if self._queue else None

    def pop_due(self, now_ms: float) -> list[tuple[str, str, Message, int]]:
        """All deliveries due at or before now, in scheduled order."""
        out = []
        while self._queue and self._queue[0].at_ms <= now_ms:
            d = heapq.heappop(self._queue)
            out.append((d.receiver, d.sender, d.msg, d.seq))
        return out

    def silent_components(self, now_ms: float,
                          period_ms: float = HEARTBEAT_PERIOD_MS) -> list[str]:
        """Watched components silent for more than the gap window; each is
        reported once until it speaks again."""
        silent = []
        for name in sorted(self._watched):
            last = self._last_heard.get(name)
            if last is None:
                continue
            if now_ms - last > HEARTBEAT_GAP_PERIODS * period_ms \
                    and name not in self._reported_silent:
                self._reported_silent.add(name)
                silent.append(name)
        return silent

    def close(self) -> None:
        if self._capture is not None:
            self._capture.close()
            self._capture = None
