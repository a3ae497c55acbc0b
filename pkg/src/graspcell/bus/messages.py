"""Typed bus messages with per-type payload schemas.

Payloads are canonical JSON dicts: string keys, values limited to JSON
scalars/lists/dicts, floats snapped to the 9-significant-digit wire grid.
Each message type validates its own payload both on encode and decode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar

from .. import canonjson


class SchemaViolation(ValueError):
    pass


def _require(cond: bool, why: str) -> None:
    if not cond:
        raise SchemaViolation(why)


def _check_counts(counts: Any) -> dict[str, int]:
    _require(isinstance(counts, dict), "counts must be an object")
    for k, v in counts.items():
        _require(isinstance(k, str), "count keys must be strings")
        _require(isinstance(v, int) and not isinstance(v, bool) and v >= 0,
                 "counts must be non-negative integers")
    return dict(counts)


def _check_number(x: Any, why: str) -> float:
    _require(isinstance(x, (int, float)) and not isinstance(x, bool), why)
    return canonjson.quantize_wire(float(x))


@dataclass(frozen=True)
class Message:
    """Base class; subclasses define TYPE_ID and the payload schema."""

    TYPE_ID: ClassVar[int] = -1
    TYPE_NAME: ClassVar[str] = "abstract"

    def to_payload(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_payload(cls, payload: dict) -> "Message":
        raise NotImplementedError


@dataclass(frozen=True)
class PickRequestMsg(Message):
    TYPE_ID: ClassVar[int] = 0x01
    TYPE_NAME: ClassVar[str] = "PickRequest"
    counts: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {"counts": _check_counts(self.counts)}

    @classmethod
    def from_payload(cls, payload: dict) -> "PickRequestMsg":
        return cls(counts=_check_counts(payload.get("counts", {})))


@dataclass(frozen=True)
class TriggerFrameMsg(Message):
    TYPE_ID: ClassVar[int] = 0x02
    TYPE_NAME: ClassVar[str] = "TriggerFrame"
    frame_id: int = 0
    counts: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        _require(isinstance(self.frame_id, int) and self.frame_id >= 0,
                 "frame_id must be a non-negative integer")
        return {"frame_id": self.frame_id, "counts": _check_counts(self.counts)}

    @classmethod
    def from_payload(cls, payload: dict) -> "TriggerFrameMsg":
        fid = payload.get("frame_id")
        _require(isinstance(fid, int) and fid >= 0, "frame_id must be a non-negative integer")
        return cls(frame_id=fid, counts=_check_counts(payload.get("counts", {})))


@dataclass(frozen=True)
class FrameReadyMsg(Message):
    TYPE_ID: ClassVar[int] = 0x03
    TYPE_NAME: ClassVar[str] = "FrameReady"
    frame_id: int = 0
    hole_fraction: float = 0.0

    def to_payload(self) -> dict:
        return {"frame_id": int(self.frame_id),
                "hole_fraction": _check_number(self.hole_fraction, "hole_fraction")}

    @classmethod
    def from_payload(cls, payload: dict) -> "FrameReadyMsg":
        fid = payload.get("frame_id")
        _require(isinstance(fid, int) and fid >= 0, "frame_id must be a non-negative integer")
        return cls(frame_id=fid,
                   hole_fraction=_check_number(payload.get("hole_fraction", 0.0),
                                               "hole_fraction"))


def _check_detection(d: Any) -> dict:
    _require(isinstance(d, dict), "detection must be an object")
    box = d.get("box")
    _require(isinstance(box, list) and len(box) == 4, "box must be [u0, v0, u1, v1]")
    box = [_check_number(x, "box coordinate") for x in box]
    _require(box[0] < box[2] and box[1] < box[3], "box must have positive extent")
    label = d.get("class_label")
    _require(isinstance(label, str) and label, "class_label must be a non-empty string")
    conf = _check_number(d.get("confidence", 0.0), "confidence")
    _require(0.0 <= conf <= 1.0, "confidence must lie in [0,1]")
    merged = d.get("merged_count", 1)
    _require(isinstance(merged, int) and merged >= 1, "merged_count must be >= 1")
    return {"box": box, "class_label": label, "confidence": conf, "merged_count": merged}


@dataclass(frozen=True)
class DetectionResultMsg(Message):
    TYPE_ID: ClassVar[int] = 0x04
    TYPE_NAME: ClassVar[str] = "DetectionResult"
    frame_id: int = 0
    detections: tuple = ()
    selected_index: int | None = None

    def to_payload(self) -> dict:
        return {
            "frame_id": int(self.frame_id),
            "detections": [_check_detection(d) for d in self.detections],
            "selected_index": self.selected_index if self.selected_index is None
            else int(self.selected_index),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "DetectionResultMsg":
        dets = payload.get("detections", [])
        _require(isinstance(dets, list), "detections must be a list")
        sel = payload.get("selected_index")
        _require(sel is None or (isinstance(sel, int) and 0 <= sel < max(1, len(dets))),
                 "selected_index out of range")
        fid = payload.get("frame_id")
        _require(isinstance(fid, int) and fid >= 0, "frame_id must be a non-negative integer")
        return cls(frame_id=fid, detections=tuple(_check_detection(d) for d in dets),
                   selected_index=sel)


@dataclass(frozen=True)
class GraspResultMsg(Message):
    TYPE_ID: ClassVar[int] = 0x05
    TYPE_NAME: ClassVar[str] = "GraspResult"
    frame_id: int = 0
    status: str = "no_grasp"  # found | no_grasp | no_requested_object
    u: float = 0.0
    v: float = 0.0
    theta: float = 0.0
    z: float = 0.0
    quality: float = 0.0
    class_label: str = ""
    provenance: dict = field(default_factory=dict)

    _STATUSES: ClassVar[tuple] = ("found", "no_grasp", "no_requested_object")

    def to_payload(self) -> dict:
        _require(self.status in self._STATUSES, f"status must be one of {self._STATUSES}")
        prov = {}
        for k, v in (self.provenance or {}).items():
            _require(isinstance(k, str) and isinstance(v, bool), "provenance flags are booleans")
            prov[k] = v
        return {
            "frame_id": int(self.frame_id),
            "status": self.status,
            "u": _check_number(self.u, "u"),
            "v": _check_number(self.v, "v"),
            "theta": _check_number(self.theta, "theta"),
            "z": _check_number(self.z, "z"),
            "quality": _check_number(self.quality, "quality"),
            "class_label": str(self.class_label),
            "provenance": prov,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "GraspResultMsg":
        status = payload.get("status")
        _require(status in cls._STATUSES, f"status must be one of {cls._STATUSES}")
        fid = payload.get("frame_id")
        _require(isinstance(fid, int) and fid >= 0, "frame_id must be a non-negative integer")
        prov = payload.get("provenance", {})
        _require(isinstance(prov, dict) and all(
            isinstance(k, str) and isinstance(v, bool) for k, v in prov.items()),
            "provenance flags are booleans")
        label = payload.get("class_label", "")
        _require(isinstance(label, str), "class_label must be a string")
        return cls(frame_id=fid, status=status,
                   u=_check_number(payload.get("u", 0.0), "u"),
                   v=_check_number(payload.get("v", 0.0), "v"),
                   theta=_check_number(payload.get("theta", 0.0), "theta"),
                   z=_check_number(payload.get("z", 0.0), "z"),
                   quality=_check_number(payload.get("quality", 0.0), "quality"),
                   class_label=label, provenance=dict(prov))


@dataclass(frozen=True)
class RobotMoveMsg(Message):
    TYPE_ID: ClassVar[int] = 0x06
    TYPE_NAME: ClassVar[str] = "RobotMove"
    command: str = "move"  # move | stop | reset
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    yaw: float = 0.0
    label: str = ""  # waypoint tag: grasp | place | home

    def to_payload(self) -> dict:
        _require(self.command in ("move", "stop", "reset"),
                 "command must be move|stop|reset")
        return {"command": self.command,
                "x": _check_number(self.x, "x"), "y": _check_number(self.y, "y"),
                "z": _check_number(self.z, "z"), "yaw": _check_number(self.yaw, "yaw"),
                "label": str(self.label)}

    @classmethod
    def from_payload(cls, payload: dict) -> "RobotMoveMsg":
        cmd = payload.get("command")
        _require(cmd in ("move", "stop", "reset"), "command must be move|stop|reset")
        label = payload.get("label", "")
        _require(isinstance(label, str), "label must be a string")
        return cls(command=cmd,
                   x=_check_number(payload.get("x", 0.0), "x"),
                   y=_check_number(payload.get("y", 0.0), "y"),
                   z=_check_number(payload.get("z", 0.0), "z"),
                   yaw=_check_number(payload.get("yaw", 0.0), "yaw"),
                   label=label)


@dataclass(frozen=True)
class RobotStatusMsg(Message):
    TYPE_ID: ClassVar[int] = 0x07
    TYPE_NAME: ClassVar[str] = "RobotStatus"
    status: str = "at_target"  # at_target | stopped
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def to_payload(self) -> dict:
        _require(self.status in ("at_target", "stopped"), "status must be at_target|stopped")
        return {"status": self.status, "x": _check_number(self.x, "x"),
                "y": _check_number(self.y, "y"), "z": _check_number(self.z, "z")}

    @classmethod
    def from_payload(cls, payload: dict) -> "RobotStatusMsg":
        status = payload.get("status")
        _require(status in ("at_target", "stopped"), "status must be at_target|stopped")
        return cls(status=status,
                   x=_check_number(payload.get("x", 0.0), "x"),
                   y=_check_number(payload.get("y", 0.0), "y"),
                   z=_check_number(payload.get("z", 0.0), "z"))


@dataclass(frozen=True)
class GripperCmdMsg(Message):
    TYPE_ID: ClassVar[int] = 0x08
    TYPE_NAME: ClassVar[str] = "GripperCmd"
    command: str = "close"  # close | open | stop | reset

    def to_payload(self) -> dict:
        _require(self.command in ("close", "open", "stop", "reset"),
                 "command must be close|open|stop|reset")
        return {"command": self.command}

    @classmethod
    def from_payload(cls, payload: dict) -> "GripperCmdMsg":
        cmd = payload.get("command")
        _require(cmd in ("close", "open", "stop", "reset"),
                 "command must be close|open|stop|reset")
        return cls(command=cmd)


@dataclass(frozen=True)
class GripperStatusMsg(Message):
    TYPE_ID: ClassVar[int] = 0x09
    TYPE_NAME: ClassVar[str] = "GripperStatus"
    state: str = "open"  # open | closed
    width_m: float = 0.0
    outcome: str = ""  # success | failure reason tag | empty
    removed_object_id: int | None = None

    def to_payload(self) -> dict:
        _require(self.state in ("open", "closed"), "state must be open|closed")
        _require(self.removed_object_id is None or isinstance(self.removed_object_id, int),
                 "removed_object_id must be an integer or null")
        return {"state": self.state, "width_m": _check_number(self.width_m, "width_m"),
                "outcome": str(self.outcome), "removed_object_id": self.removed_object_id}

    @classmethod
    def from_payload(cls, payload: dict) -> "GripperStatusMsg":
        state = payload.get("state")
        _require(state in ("open", "closed"), "state must be open|closed")
        rid = payload.get("removed_object_id")
        _require(rid is None or isinstance(rid, int), "removed_object_id must be int or null")
        outcome = payload.get("outcome", "")
        _require(isinstance(outcome, str), "outcome must be a string")
        return cls(state=state, width_m=_check_number(payload.get("width_m", 0.0), "width_m"),
                   outcome=outcome, removed_object_id=rid)


@dataclass(frozen=True)
class EStopMsg(Message):
    TYPE_ID: ClassVar[int] = 0x0A
    TYPE_NAME: ClassVar[str] = "EStop"

    def to_payload(self) -> dict:
        return {}

    @classmethod
    def from_payload(cls, payload: dict) -> "EStopMsg":
        _require(payload == {}, "estop payload must be empty")
        return cls()


@dataclass(frozen=True)
class HeartbeatMsg(Message):
    TYPE_ID: ClassVar[int] = 0x0B
    TYPE_NAME: ClassVar[str] = "Heartbeat"
    sender: str = ""
    count: int = 0

    def to_payload(self) -> dict:
        _require(isinstance(self.sender, str) and self.sender, "sender required")
        _require(isinstance(self.count, int) and self.count >= 0, "count must be >= 0")
        return {"sender": self.sender, "count": self.count}

    @classmethod
    def from_payload(cls, payload: dict) -> "HeartbeatMsg":
        sender = payload.get("sender")
        _require(isinstance(sender, str) and sender, "sender required")
        count = payload.get("count")
        _require(isinstance(count, int) and count >= 0, "count must be >= 0")
        return cls(sender=sender, count=count)


@dataclass(frozen=True)
class HmiEventMsg(Message):
    TYPE_ID: ClassVar[int] = 0x0C
    TYPE_NAME: ClassVar[str] = "HmiEvent"
    record: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        _require(isinstance(self.record, dict), "record must be an object")
        return {"record": self.record}

    @classmethod
    def from_payload(cls, payload: dict) -> "HmiEventMsg":
        record = payload.get("record")
        _require(isinstance(record, dict), "record must be an object")
        return cls(record=record)


MESSAGE_TYPES: dict[int, type[Message]] = {
    cls.TYPE_ID: cls
    for cls in (PickRequestMsg, TriggerFrameMsg, FrameReadyMsg, DetectionResultMsg,
                GraspResultMsg, RobotMoveMsg, RobotStatusMsg, GripperCmdMsg,
                GripperStatusMsg, EStopMsg, HeartbeatMsg, HmiEventMsg)
}
