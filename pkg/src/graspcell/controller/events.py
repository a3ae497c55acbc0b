"""Controller state, event, and action vocabulary."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class CellState(enum.Enum):
    IDLE = "Idle"
    AWAIT_REQUEST = "AwaitRequest"
    CAPTURE_FRAME = "CaptureFrame"
    DETECTING = "Detecting"
    SELECTING_OBJECT = "SelectingObject"
    PLANNING_GRASP = "PlanningGrasp"
    MOVING_TO_GRASP = "MovingToGrasp"
    CLOSING = "Closing"
    VERIFYING_GRASP = "VerifyingGrasp"
    TRANSPORTING = "Transporting"
    PLACING = "Placing"
    UPDATING_LIST = "UpdatingList"
    REPORTING_UNAVAILABLE = "ReportingUnavailable"
    DONE = "Done"
    HALTED = "Halted"


class EventKind(enum.Enum):
    REQUEST_RECEIVED = "RequestReceived"
    FRAME_READY = "FrameReady"
    DETECTIONS_READY = "DetectionsReady"
    NO_REQUESTED_OBJECT_DETECTED = "NoRequestedObjectDetected"
    OBJECT_SELECTED = "ObjectSelected"
    GRASP_FOUND = "GraspFound"
    NO_GRASP_FOUND = "NoGraspFound"
    MOTION_DONE = "MotionDone"
    GRIPPER_CLOSED = "GripperClosed"
    OBJECT_VERIFIED = "ObjectVerified"
    NOTHING_GRASPED = "NothingGrasped"
    PLACE_DONE = "PlaceDone"
    LIST_FULFILLED = "ListFulfilled"
    LIST_OPEN = "ListOpen"
    ESTOP = "EStop"
    RESET = "Reset"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class CellEvent:
    """Immutable event; payload fields are optional and kind-specific."""

    kind: EventKind
    width_m: float | None = None  # GripperClosed
    class_label: str | None = None  # ObjectVerified / request bookkeeping
    stage: str | None = None  # Timeout
    data: dict = field(default_factory=dict)

    def describe(self) -> str:
        parts = [self.kind.value]
        if self.width_m is not None:
            parts.append(f"width={self.width_m * 1000:.1f}mm")
        if self.class_label is not None:
            parts.append(self.class_label)
        if self.stage is not None:
            parts.append(self.stage)
        return "(" + ", ".join(parts) + ")" if len(parts) > 1 else parts[0]

    def to_log(self) -> Any:
        if self.width_m is None and self.class_label is None and self.stage is None:
            return self.kind.value
        payload: dict[str, Any] = {"kind": self.kind.value}
        if self.width_m is not None:
            payload["width_m"] = round(self.width_m, 6)
        if self.class_label is not None:
            payload["class_label"] = self.class_label
        if self.stage is not None:
            payload["stage"] = self.stage
        return payload


class ActionKind(enum.Enum):
    TRIGGER_CAMERA = "TriggerCamera"
    MOVE_TO_GRASP = "MoveToGrasp"
    MOVE_TO_PLACE = "MoveToPlace"
    CLOSE_GRIPPER = "CloseGripper"
    OPEN_GRIPPER = "OpenGripper"
    REOPEN_GRIPPER = "ReopenGripper"
    STOP_ALL = "StopAll"
    RESET_HARDWARE = "ResetHardware"  # releases the devices' stop latch
    NOTIFY_HMI = "NotifyHmi"
    LOG_IGNORED = "LogIgnored"
    EMIT = "Emit"  # feeds an event back into the scan queue


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    event: CellEvent | None = None  # for EMIT
    data: dict = field(default_factory=dict)

    def to_log(self) -> Any:
        if self.kind is ActionKind.EMIT and self.event is not None:
            return {"kind": "Emit", "event": self.event.to_log()}
        if self.data:
            return {"kind": self.kind.value, **self.data}
        return self.kind.value


def emit(event: CellEvent) -> Action:
    return Action(kind=ActionKind.EMIT, event=event)
