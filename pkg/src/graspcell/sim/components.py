"""Simulated devices behind the bus: perception service and cell hardware.

The perception service owns the camera: a frame trigger renders the scene,
runs the image pipeline, and reports results with emulated stage durations.
The hardware unit answers robot motion and gripper commands, adjudicating
each closure against the noiseless ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..bus.messages import (
    DetectionResultMsg,
    FrameReadyMsg,
    GraspResultMsg,
    GripperCmdMsg,
    GripperStatusMsg,
    Message,
    RobotMoveMsg,
    RobotStatusMsg,
    TriggerFrameMsg,
)
from ..canonjson import quantize_wire
from ..config import RunConfig
from ..controller.motion import motion_time
from ..perception.inpaint import AllHoles, inpaint
from ..perception.detector import detect
from ..perception.planner import NoFeasibleGrasp, plan_grasp
from ..perception.preprocess import crop_to_box, preprocess_depth
from ..perception.selection import candidate_order
from ..perception.types import BoundingBox, Detection
from ..scene.grasp_truth import apply_grasp
from ..scene.render import render_frame
from ..scene.types import CameraPose, Scene, WorldGrasp

SendFn = Callable[[str, Message], None]  # (receiver, message) at current sim time
LaterFn = Callable[[float, Callable[[], None]], None]  # (delay_ms, thunk)


@dataclass
class FrameSummary:
    """What perception saw for one trigger; kept for the HMI and metrics."""

    frame_id: int
    detections: list[Detection]
    selected_index: int | None
    grasp: dict | None
    depth_preview: object = None  # inpainted ROI DepthFrame for overlays


class PerceptionService:
    """Single-pipeline image path: render, preprocess, inpaint, detect,
    select, crop, plan.  Stage results are sent with configured delays."""

    def __init__(self, cfg: RunConfig, scene: Scene, send: SendFn, later: LaterFn,
                 name: str = "perception"):
        self.cfg = cfg
        self.scene = scene
        self.send = send
        self.later = later
        self.name = name
        self.frames_rendered = 0
        self.last_summary: FrameSummary | None = None
        self.wedged = False  # test hook: drop triggers to exercise timeouts

    def _camera_pose(self) -> CameraPose:
        return CameraPose(x=self.scene.bin_dims.length / 2,
                          y=self.scene.bin_dims.width / 2,
                          height=self.cfg.camera.pose_height)

    def _bin_roi(self) -> tuple[int, int, int, int]:
        """Pixel rectangle covering the bin at floor depth, clamped to frame."""
        cam = self.cfg.camera.intrinsics
        pose = self._camera_pose()
        z = pose.height
        corners_u = []
        corners_v = []
        for bx in (0.0, self.scene.bin_dims.length):
            for by in (0.0, self.scene.bin_dims.width):
                corners_u.append(cam.fx * (bx - pose.x) / z + cam.cx)
                corners_v.append(cam.fy * (by - pose.y) / z + cam.cy)
        pad = 8
        u0 = max(0, int(min(corners_u)) - pad)
        v0 = max(0, int(min(corners_v)) - pad)
        u1 = min(cam.width, int(max(corners_u)) + pad)
        v1 = min(cam.height, int(max(corners_v)) + pad)
        return (u0, v0, u1, v1)

    def on_message(self, sender: str, msg: Message) -> None:
        if isinstance(msg, TriggerFrameMsg) and not self.wedged:
            self._process_frame(msg)

    def _process_frame(self, trigger: TriggerFrameMsg) -> None:
        cfg = self.cfg
        cam = cfg.camera.intrinsics
        pose = self._camera_pose()
        frame_seed = int(np.random.default_rng(
            [cfg.scene.seed, trigger.frame_id, 0xF4A3]).integers(2 ** 31))

        raw, gt = render_frame(self.scene, cam, pose, cfg.noise, seed=frame_seed)
        self.frames_rendered += 1

        roi = self._bin_roi()
        roi_dims = (roi[2] - roi[0], roi[3] - roi[1])
        pre = preprocess_depth(raw, roi, roi_dims)
        hole_fraction = float(1.0 - pre.valid.mean())
        t = cfg.timing.preprocess_ms
        self.later(t, lambda: self.send("plc", FrameReadyMsg(
            frame_id=trigger.frame_id, hole_fraction=quantize_wire(hole_fraction))))

        try:
            filled = inpaint(pre)
        except AllHoles:
            filled = pre.copy()
            filled.data[:] = pose.height
            filled.valid[:] = True

        # ground-truth boxes live in sensor pixels; mirror them into ROI coords
        gt_roi = []
        for e in gt:
            if e.box is None:
                gt_roi.append(e)
                continue
            u0, v0 = pre.transform.from_sensor(e.box[0], e.box[1])
            u1, v1 = pre.transform.from_sensor(e.box[2], e.box[3])
            gt_roi.append(type(e)(e.object_id, e.class_label, (u0, v0, u1, v1),
                                  e.occlusion, e.degenerate))

        detections = detect(gt_roi, cfg.detector, frame_seed,
                            frame_size=(pre.width, pre.height))
        order = candidate_order(detections, trigger.counts)
        t += cfg.timing.detect_ms

        if not order:
            self.last_summary = FrameSummary(trigger.frame_id, detections, None, None, filled)
            msg = DetectionResultMsg(frame_id=trigger.frame_id,
                                     detections=tuple(self._det_payload(d)
                                                      for d in detections),
                                     selected_index=None)
            self.later(t, lambda: self.send("plc", msg))
            return

        chosen: int | None = None
        grasp_result: GraspResultMsg | None = None
        planner_cfg = cfg.planner.to_planner_config()
        attempts = 0
        for idx in order:
            attempts += 1
            det = detections[idx]
            crop = crop_to_box(filled, det.box, (cfg.planner.crop_size_px,) * 2,
                               pad=cfg.planner.crop_pad_px)
            box_crop = self._box_in_crop(det.box, pre, crop)
            try:
                gm = plan_grasp(crop, box_crop, cfg.gripper, cam, cfg=planner_cfg)
            except NoFeasibleGrasp:
                continue
            chosen = idx
            su, sv = crop.transform.to_sensor(gm.best.u, gm.best.v)
            raw_u, raw_v = pre.transform.to_sensor(*pre.transform.from_sensor(su, sv))
            # provenance: was the chosen pixel a hole before inpainting?
            ru, rv = pre.transform.from_sensor(su, sv)
            iu = int(np.clip(round(ru), 0, pre.width - 1))
            iv = int(np.clip(round(rv), 0, pre.height - 1))
            was_hole = not bool(pre.valid[iv, iu])
            grasp_result = GraspResultMsg(
                frame_id=trigger.frame_id, status="found",
                u=quantize_wire(su), v=quantize_wire(sv),
                theta=quantize_wire(gm.best.theta), z=quantize_wire(gm.best.z),
                quality=quantize_wire(gm.best.quality),
                class_label=det.class_label,
                provenance={"merged_box": det.merged_count > 1,
                            "inpaint_bulge": was_hole})
            self.last_summary = FrameSummary(
                trigger.frame_id, detections, idx,
                {"u": su, "v": sv, "theta": gm.best.theta, "z": gm.best.z,
                 "quality": gm.best.quality, "class_label": det.class_label}, filled)
            break

        det_msg = DetectionResultMsg(
            frame_id=trigger.frame_id,
            detections=tuple(self._det_payload(d) for d in detections),
            selected_index=chosen)
        self.later(t, lambda: self.send("plc", det_msg))

        t += cfg.timing.grasp_ms * max(1, attempts)
        if grasp_result is None:
            self.last_summary = FrameSummary(trigger.frame_id, detections, None, None, filled)
            grasp_result = GraspResultMsg(frame_id=trigger.frame_id, status="no_grasp")
        self.later(t, lambda: self.send("plc", grasp_result))

    @staticmethod
    def _det_payload(d: Detection) -> dict:
        return {"box": [quantize_wire(x) for x in d.box.as_tuple()],
                "class_label": d.class_label,
                "confidence": quantize_wire(d.confidence),
                "merged_count": d.merged_count}

    @staticmethod
    def _box_in_crop(box: BoundingBox, source, crop) -> BoundingBox:
        """Map a box in `source` frame pixels into `crop` pixels (via sensor)."""
        u0, v0 = crop.transform.from_sensor(*source.transform.to_sensor(box.u_min, box.v_min))
        u1, v1 = crop.transform.from_sensor(*source.transform.to_sensor(box.u_max, box.v_max))
        u0 = max(0.0, min(float(crop.width), u0))
        v0 = max(0.0, min(float(crop.height), v0))
        u1 = max(0.0, min(float(crop.width), u1))
        v1 = max(0.0, min(float(crop.height), v1))
        if u1 - u0 < 1.0 or v1 - v0 < 1.0:
            return BoundingBox(0.0, 0.0, float(crop.width), float(crop.height))
        return BoundingBox(u0, v0, u1, v1)


@dataclass
class Adjudication:
    t_ms: float
    grasp_robot: tuple[float, float, float, float]
    success: bool
    reason: str
    removed_object_id: int | None
    width_m: float


class CellHardware:
    """Robot arm plus gripper: timed point-to-point moves and ground-truth
    grasp adjudication.  Robot-frame poses convert to the bin frame through
    the fixed bin placement."""

    def __init__(self, cfg: RunConfig, scene: Scene, send: SendFn, later: LaterFn,
                 episode_seed: int = 0):
        self.cfg = cfg
        self.scene = scene
        self.send = send
        self.later = later
        self.episode_seed = episode_seed
        bx, by, _ = cfg.robot_bin_center
        place_d = cfg.bins.place_distance_m
        self.place_pos = (bx + place_d, by, 0.10)
        self.pose = self.place_pos  # robot parks over the receptive bin
        self.pending_grasp: tuple[float, float, float, float] | None = None
        self.holding_object: int | None = None
        self.adjudications: list[Adjudication] = []
        self.moving = False
        self.stopped = False
        self.wedged = False
        self._motion_gen = 0  # cancels stale arrival callbacks on re-command

    def robot_to_bin(self, x: float, y: float, yaw: float) -> WorldGrasp:
        bx, by, _ = self.cfg.robot_bin_center
        half_l = self.scene.bin_dims.length / 2
        half_w = self.scene.bin_dims.width / 2
        # overhead camera mirror: robot +y runs against bin +y
        return WorldGrasp(x=x - (bx - half_l), y=(by + half_w) - y, z=0.0, yaw=-yaw)

    def on_message(self, sender: str, msg: Message) -> None:
        if self.wedged:
            return
        if isinstance(msg, RobotMoveMsg):
            self._on_move(msg)
        elif isinstance(msg, GripperCmdMsg):
            self._on_gripper(msg)

    def _on_move(self, msg: RobotMoveMsg) -> None:
        self._motion_gen += 1
        if msg.command == "stop":
            self.stopped = True
            self.moving = False
            self.later(1.0, lambda: self.send(
                "plc", RobotStatusMsg(status="stopped",
                                      x=quantize_wire(self.pose[0]),
                                      y=quantize_wire(self.pose[1]),
                                      z=quantize_wire(self.pose[2]))))
            return
        if msg.command == "reset":
            self.stopped = False
            self.moving = False
            self.pending_grasp = None
            return
        if self.stopped:
            return
        target = (msg.x, msg.y, msg.z)
        duration_s = motion_time(self.pose, target, self.cfg.motion)
        if msg.label == "place":
            duration_s += self.cfg.motion.settle_s
        if msg.label == "grasp":
            self.pending_grasp = (msg.x, msg.y, msg.z, msg.yaw)
        self.moving = True
        gen = self._motion_gen

        def arrive() -> None:
            if self.stopped or gen != self._motion_gen:
                return  # superseded by a newer command
            self.pose = target
            self.moving = False
            self.send("plc", RobotStatusMsg(status="at_target",
                                            x=quantize_wire(target[0]),
                                            y=quantize_wire(target[1]),
                                            z=quantize_wire(target[2])))

        self.later(duration_s * 1000.0, arrive)

    def _on_gripper(self, msg: GripperCmdMsg) -> None:
        if msg.command == "stop":
            self.stopped = True
            return
        if msg.command == "reset":
            self.stopped = False
            self.holding_object = None
            return
        if self.stopped:
            return
        if msg.command == "close":
            status = self._adjudicate()
            self.later(self.cfg.motion.grip_close_s * 1000.0,
                       lambda: self.send("plc", status))
        else:  # open
            self.holding_object = None
            self.later(self.cfg.motion.grip_open_s * 1000.0,
                       lambda: self.send("plc", GripperStatusMsg(state="open")))

    def _adjudicate(self) -> GripperStatusMsg:
        if self.pending_grasp is None:
            return GripperStatusMsg(state="closed", width_m=0.0, outcome="EmptyClosure")
        x, y, _, yaw = self.pending_grasp
        grasp = self.robot_to_bin(x, y, yaw)
        pick_idx = len(self.adjudications)
        bd = self.scene.bin_dims
        if not (0.0 <= grasp.x <= bd.length and 0.0 <= grasp.y <= bd.width):
            outcome_success, reason, removed, width = False, "OutOfBounds", None, 0.0
        else:
            out = apply_grasp(self.scene, grasp, self.cfg.gripper,
                              slip_rate=self.cfg.slip_rate,
                              seed=self.episode_seed * 100_003 + pick_idx)
            outcome_success = out.success
            reason = "" if out.success else out.failure_reason.value
            removed = out.removed_object_id
            width = out.grasped_width_m
        self.adjudications.append(Adjudication(
            t_ms=0.0, grasp_robot=self.pending_grasp, success=outcome_success,
            reason=reason, removed_object_id=removed, width_m=width))
        self.pending_grasp = None
        if outcome_success:
            self.holding_object = removed
            return GripperStatusMsg(state="closed", width_m=quantize_wire(width),
                                    outcome="success", removed_object_id=removed)
        # all physical failures read as an empty closure at the jaws
        return GripperStatusMsg(state="closed", width_m=0.0, outcome=reason or "EmptyClosure")
