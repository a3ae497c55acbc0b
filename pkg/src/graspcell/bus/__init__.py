from .messages import (
    MESSAGE_TYPES,
    DetectionResultMsg,
    EStopMsg,
    FrameReadyMsg,
    GraspResultMsg,
    GripperCmdMsg,
    GripperStatusMsg,
    HeartbeatMsg,
    HmiEventMsg,
    Message,
    PickRequestMsg,
    RobotMoveMsg,
    RobotStatusMsg,
    SchemaViolation,
    TriggerFrameMsg,
)
from .codec import FrameError, NeedMoreBytes, decode_frame, encode_frame
from .link import Link, LinkParams, deliver
from .router import BusRouter, Endpoint, BusDumpWriter, read_busdump

__all__ = [
    "MESSAGE_TYPES",
    "DetectionResultMsg",
    "EStopMsg",
    "FrameReadyMsg",
    "GraspResultMsg",
    "GripperCmdMsg",
    "GripperStatusMsg",
    "HeartbeatMsg",
    "HmiEventMsg",
    "Message",
    "PickRequestMsg",
    "RobotMoveMsg",
    "RobotStatusMsg",
    "SchemaViolation",
    "TriggerFrameMsg",
    "FrameError",
    "NeedMoreBytes",
    "decode_frame",
    "encode_frame",
    "Link",
    "LinkParams",
    "deliver",
    "BusRouter",
    "Endpoint",
    "BusDumpWriter",
    "read_busdump",
]
