"""Closed-loop episode execution under a simulated clock.

One episode: generate a bin, submit the pick request, and run controller,
perception, hardware, and bus purely on scheduled events until the request is
fulfilled, reported unavailable, halted, or the pick cap fires.  No wall time
enters any recorded value, so identical (config, seed) runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bus.link import LinkParams
from ..bus.messages import (
    DetectionResultMsg,
    EStopMsg,
    FrameReadyMsg,
    GraspResultMsg,
    GripperStatusMsg,
    HeartbeatMsg,
    HmiEventMsg,
    Message,
    PickRequestMsg,
    RobotMoveMsg,
    RobotStatusMsg,
    GripperCmdMsg,
    TriggerFrameMsg,
)
from ..bus.router import BusRouter
from ..config import RunConfig
from ..controller.dfa import DfaContext
from ..controller.events import Action, ActionKind, CellEvent, CellState, EventKind
from ..controller.scan import ControllerTask, TransitionRecord
from ..controller.transforms import Extrinsics, deproject, to_robot_frame
from ..scene.catalog import build_template
from ..scene.generate import Packing, generate_bin
from .clock import Scheduler
from .components import CellHardware, PerceptionService


@dataclass
class PickRecord:
    pick_index: int
    t_trigger_ms: float
    t_motion_ms: float
    t_closed_ms: float
    t_completed_ms: float | None
    class_label: str
    success: bool
    reason: str
    quality: float
    merged_box: bool
    inpaint_bulge: bool
    grasp_robot: tuple[float, float, float, float]

    def to_dict(self) -> dict:
        return {
            "pick_index": self.pick_index,
            "t_trigger_ms": self.t_trigger_ms,
            "t_motion_ms": self.t_motion_ms,
            "t_closed_ms": self.t_closed_ms,
            "t_completed_ms": self.t_completed_ms,
            "class_label": self.class_label,
            "success": self.success,
            "reason": self.reason,
            "quality": round(self.quality, 6),
            "merged_box": self.merged_box,
            "inpaint_bulge": self.inpaint_bulge,
            "grasp_robot": [round(v, 6) for v in self.grasp_robot],
        }


@dataclass
class EpisodeResult:
    seed: int
    final_state: CellState
    transitions: list[TransitionRecord]
    picks: list[PickRecord]
    missed_detection_frames: int
    unavailable: list[str]
    faulted: bool
    sim_time_ms: float
    request: dict
    t_request_ms: float = 0.0


class EpisodeRunner:
    """Wires one cell instance together over the bus and the DES clock."""

    DEVICES = ("perception", "robot", "gripper")

    def __init__(self, cfg: RunConfig, seed: int, capture_path: str | None = None,
                 live: bool = False):
        self.cfg = cfg
        self.seed = seed
        self.live = live
        self.on_transition = None  # optional hook: fn(TransitionRecord)
        self.sched = Scheduler()
        self.router = BusRouter(
            seed=seed,
            default_params=LinkParams(latency_ms=cfg.timing.link_latency_ms,
                                      jitter_ms=cfg.timing.link_jitter_ms),
            capture_path=capture_path)

        catalog = [build_template(name) for name in cfg.scene.catalog]
        packing = Packing.LIGHT if cfg.scene.packing == "Light" else Packing.DENSE
        self.scene = generate_bin(seed=cfg.scene.seed + seed, catalog=catalog,
                                  count=cfg.scene.count, packing=packing,
                                  bin_dims=cfg.bin_dims, gripper=cfg.gripper)
        if cfg.request:
            self.request = dict(cfg.request)
        else:
            # default workflow: request everything in the bin
            self.request = {}
            for obj in self.scene.objects:
                self.request[obj.class_label] = self.request.get(obj.class_label, 0) + 1

        self.task = ControllerTask(
            ctx=DfaContext(n_frames=cfg.n_frames_unavailable),
            scan_ms=int(cfg.timing.scan_ms),
            stage_timeout_ms=int(cfg.timing.stage_timeout_ms),
            motion_timeout_ms=int(cfg.timing.motion_timeout_ms))
        self.extrinsics = Extrinsics.overhead_camera(
            (cfg.robot_bin_center[0], cfg.robot_bin_center[1], cfg.camera.pose_height))

        self.perception = PerceptionService(cfg, self.scene, self._send_from("perception"),
                                            self.sched.after)
        self.hardware = CellHardware(cfg, self.scene, self._send_from("robot"),
                                     self.sched.after, episode_seed=seed)

        for device in self.DEVICES:
            self.router.watch_heartbeat(device)

        self.transitions: list[TransitionRecord] = []
        self.picks: list[PickRecord] = []
        self.missed_frames = 0
        self.frame_counter = 0
        self.pick_cap = max(1, cfg.pick_cap_factor * max(1, sum(self.request.values())))
        self._pending_pick: dict | None = None
        self._last_trigger_ms = 0.0
        self._hb_counts = {d: 0 for d in self.DEVICES}
        self.t_request_ms = 0.0
        self.finished = False

    # -- bus plumbing ------------------------------------------------------

    def _send_from(self, sender: str):
        def send(receiver: str, msg: Message) -> None:
            at = self.router.send(sender, receiver, msg, self.sched.now_ms)
            self.sched.at(at, self._pump)
        return send

    def _pump(self) -> None:
        for receiver, sender, msg, _seq in self.router.pop_due(self.sched.now_ms):
            if receiver == "plc":
                self._controller_receive(sender, msg)
            elif receiver == "perception":
                self.perception.on_message(sender, msg)
            elif receiver in ("robot", "gripper"):
                self.hardware.on_message(sender, msg)
            # hmi sink: records already live in the transition log

    # -- controller bridge -------------------------------------------------

    def _controller_receive(self, sender: str, msg: Message) -> None:
        events = self._translate(msg)
        for event in events:
            self.task.post(event)

    def _translate(self, msg: Message) -> list[CellEvent]:
        if isinstance(msg, EStopMsg):
            return [CellEvent(kind=EventKind.ESTOP)]
        if isinstance(msg, PickRequestMsg):
            return [CellEvent(kind=EventKind.REQUEST_RECEIVED,
                              data={"counts": dict(msg.counts)})]
        if isinstance(msg, FrameReadyMsg):
            return [CellEvent(kind=EventKind.FRAME_READY)]
        if isinstance(msg, DetectionResultMsg):
            if msg.selected_index is None:
                self.missed_frames += 1
                return [CellEvent(kind=EventKind.NO_REQUESTED_OBJECT_DETECTED)]
            label = msg.detections[msg.selected_index]["class_label"]
            return [CellEvent(kind=EventKind.DETECTIONS_READY),
                    CellEvent(kind=EventKind.OBJECT_SELECTED, class_label=label)]
        if isinstance(msg, GraspResultMsg):
            if msg.status != "found":
                return [CellEvent(kind=EventKind.NO_GRASP_FOUND)]
            # PLC duty: pixel -> camera -> robot frame
            p_cam = deproject(msg.u, msg.v, msg.z, self.cfg.camera.intrinsics)
            x, y, z, yaw = to_robot_frame(p_cam, self.extrinsics, yaw_cam=msg.theta)
            self._pending_pick = {
                "t_trigger_ms": self._last_trigger_ms,
                "class_label": msg.class_label,
                "quality": msg.quality,
                "merged_box": bool(msg.provenance.get("merged_box", False)),
                "inpaint_bulge": bool(msg.provenance.get("inpaint_bulge", False)),
                "target": (x, y, z, yaw),
            }
            return [CellEvent(kind=EventKind.GRASP_FOUND,
                              data={"x": x, "y": y, "z": z, "yaw": yaw})]
        if isinstance(msg, RobotStatusMsg):
            if msg.status == "at_target":
                return [CellEvent(kind=EventKind.MOTION_DONE)]
            return []
        if isinstance(msg, GripperStatusMsg):
            if msg.state == "closed":
                if self._pending_pick is not None and "t_closed_ms" not in self._pending_pick:
                    self._pending_pick["t_closed_ms"] = self.sched.now_ms
                    self._pending_pick["outcome"] = msg.outcome
                    self._pending_pick["success"] = msg.outcome == "success"
                return [CellEvent(kind=EventKind.GRIPPER_CLOSED, width_m=msg.width_m)]
            return [CellEvent(kind=EventKind.PLACE_DONE)]
        return []

    def _apply_actions(self, actions: list[Action]) -> None:
        now = self.sched.now_ms
        send_plc = self._send_from("plc")
        for action in actions:
            if action.kind is ActionKind.TRIGGER_CAMERA:
                self._finalize_failed_pick()
                self.frame_counter += 1
                self._last_trigger_ms = now
                send_plc("perception", TriggerFrameMsg(
                    frame_id=self.frame_counter,
                    counts=self.task.ctx.request.actionable()))
            elif action.kind is ActionKind.MOVE_TO_GRASP:
                d = action.data
                if self._pending_pick is not None:
                    self._pending_pick["t_motion_ms"] = now
                send_plc("robot", RobotMoveMsg(command="move", x=d.get("x", 0.0),
                                               y=d.get("y", 0.0), z=d.get("z", 0.0),
                                               yaw=d.get("yaw", 0.0), label="grasp"))
            elif action.kind is ActionKind.MOVE_TO_PLACE:
                p = self.hardware.place_pos
                send_plc("robot", RobotMoveMsg(command="move", x=p[0], y=p[1], z=p[2],
                                               yaw=0.0, label="place"))
            elif action.kind is ActionKind.CLOSE_GRIPPER:
                send_plc("gripper", GripperCmdMsg(command="close"))
            elif action.kind in (ActionKind.OPEN_GRIPPER, ActionKind.REOPEN_GRIPPER):
                send_plc("gripper", GripperCmdMsg(command="open"))
            elif action.kind is ActionKind.STOP_ALL:
                send_plc("robot", RobotMoveMsg(command="stop"))
                send_plc("gripper", GripperCmdMsg(command="stop"))
            elif action.kind is ActionKind.RESET_HARDWARE:
                send_plc("robot", RobotMoveMsg(command="reset"))
                send_plc("gripper", GripperCmdMsg(command="reset"))
            elif action.kind is ActionKind.NOTIFY_HMI:
                send_plc("hmi", HmiEventMsg(record={"note": action.data.get("note", ""),
                                                    **{k: v for k, v in action.data.items()
                                                       if k != "note"}}))

    def _finalize_failed_pick(self) -> None:
        """A camera retrigger after a closure means the previous pick ended."""
        p = self._pending_pick
        if p is None or "t_closed_ms" not in p:
            return
        self.picks.append(PickRecord(
            pick_index=len(self.picks),
            t_trigger_ms=p["t_trigger_ms"],
            t_motion_ms=p.get("t_motion_ms", p["t_trigger_ms"]),
            t_closed_ms=p["t_closed_ms"],
            t_completed_ms=None if not p.get("success") else self.sched.now_ms,
            class_label=p["class_label"],
            success=bool(p.get("success")),
            reason=p.get("outcome", ""),
            quality=p.get("quality", 0.0),
            merged_box=p.get("merged_box", False),
            inpaint_bulge=p.get("inpaint_bulge", False),
            grasp_robot=p.get("target", (0.0, 0.0, 0.0, 0.0)),
        ))
        self._pending_pick = None

    # -- scan + heartbeat ticks ---------------------------------------------

    def _scan_tick(self) -> None:
        if self.finished:
            return
        for silent in self.router.silent_components(
                self.sched.now_ms, self.cfg.timing.heartbeat_period_ms):
            self.task.post(CellEvent(kind=EventKind.TIMEOUT, stage=silent))
        result = self.task.scan(int(self.sched.now_ms))
        if result.records:
            self.transitions.extend(result.records)
        # record completed picks before actions: a same-scan camera retrigger
        # must not fold a success into the failed-pick finalizer
        for record in result.records:
            if record.state_to is CellState.UPDATING_LIST and self._pending_pick is not None:
                pick = self._pending_pick
                self._pending_pick = None
                self.picks.append(PickRecord(
                    pick_index=len(self.picks),
                    t_trigger_ms=pick["t_trigger_ms"],
                    t_motion_ms=pick.get("t_motion_ms", pick["t_trigger_ms"]),
                    t_closed_ms=pick.get("t_closed_ms", self.sched.now_ms),
                    t_completed_ms=self.sched.now_ms,
                    class_label=pick["class_label"],
                    success=True,
                    reason="",
                    quality=pick.get("quality", 0.0),
                    merged_box=pick.get("merged_box", False),
                    inpaint_bulge=pick.get("inpaint_bulge", False),
                    grasp_robot=pick.get("target", (0.0, 0.0, 0.0, 0.0)),
                ))
        self._apply_actions(result.actions)
        if self.on_transition is not None:
            for record in result.records:
                self.on_transition(record)
        if not self.live:
            if self.task.state in (CellState.DONE, CellState.REPORTING_UNAVAILABLE,
                                   CellState.HALTED):
                self._finalize_failed_pick()
                self.finished = True
                return
            if len(self.picks) >= self.pick_cap:
                self.finished = True
                return
        self.sched.after(self.cfg.timing.scan_ms, self._scan_tick)

    def _heartbeat_tick(self, device: str) -> None:
        if self.finished:
            return
        wedged = (device == "perception" and self.perception.wedged) or \
                 (device in ("robot", "gripper") and self.hardware.wedged)
        if not wedged:
            self._hb_counts[device] += 1
            self._send_from(device)("plc", HeartbeatMsg(sender=device,
                                                        count=self._hb_counts[device]))
        self.sched.after(self.cfg.timing.heartbeat_period_ms,
                         lambda: self._heartbeat_tick(device))

    # -- run -----------------------------------------------------------------

    def submit_request(self) -> None:
        self.t_request_ms = self.sched.now_ms
        self._send_from("hmi")("plc", PickRequestMsg(counts=self.request))

    def submit_estop(self) -> None:
        self.router.send("hmi", "plc", EStopMsg(), self.sched.now_ms)
        self.sched.at(self.sched.now_ms, self._pump)

    def run(self, limit_ms: float = 3_600_000.0) -> EpisodeResult:
        for device in self.DEVICES:
            self._heartbeat_tick(device)
        self.submit_request()
        self.sched.after(self.cfg.timing.scan_ms, self._scan_tick)
        try:
            self.sched.run_until(lambda: self.finished, limit_ms)
        except TimeoutError:
            self.task.faulted = True
            self.finished = True
        return EpisodeResult(
            seed=self.seed,
            final_state=self.task.state,
            transitions=self.transitions,
            picks=self.picks,
            missed_detection_frames=self.missed_frames,
            unavailable=sorted(self.task.ctx.request.unavailable),
            faulted=self.task.faulted,
            sim_time_ms=self.sched.now_ms,
            request=dict(self.request),
            t_request_ms=self.t_request_ms,
        )


def run_episode(cfg: RunConfig, seed: int) -> EpisodeResult:
    return EpisodeRunner(cfg, seed).run()


def run_many(cfg: RunConfig, seed: int) -> list[EpisodeResult]:
    return [run_episode(cfg, seed + i) for i in range(cfg.episodes)]
