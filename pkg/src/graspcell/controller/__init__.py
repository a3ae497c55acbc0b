from .events import Action, ActionKind, CellEvent, CellState, EventKind
from .request import PickRequest, update_request
from .dfa import DfaContext, dfa_step
from .scan import ControllerTask, ScanResult, scan_cycle
from .transforms import BadDepth, Extrinsics, deproject, project, to_robot_frame
from .motion import MotionProfile, motion_time

__all__ = [
    "Action",
    "ActionKind",
    "CellEvent",
    "CellState",
    "EventKind",
    "PickRequest",
    "update_request",
    "DfaContext",
    "dfa_step",
    "ControllerTask",
    "ScanResult",
    "scan_cycle",
    "BadDepth",
    "Extrinsics",
    "deproject",
    "project",
    "to_robot_frame",
    "MotionProfile",
    "motion_time",
]
