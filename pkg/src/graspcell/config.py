"""Run configuration: YAML loading, validation, canonical resolution.

Unknown keys are rejected at every level; the fully-resolved configuration is
echoed into reports so a run is reproducible from its artifacts alone.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import canonjson
from .controller.motion import MotionProfile
from .perception.planner import PlannerConfig
from .perception.types import DetectorParams
from .scene.types import BinDims, CameraIntrinsics, GripperParams, NoiseParams


class ParseError(ValueError):
    pass


class UnknownKey(ParseError):
    pass


@dataclass(frozen=True)
class SceneConfig:
    catalog: tuple[str, ...] = ("hammer", "dog", "eggplant", "banana", "mug", "block")
    count: int = 6
    packing: str = "Light"
    seed: int = 7

    def __post_init__(self) -> None:
        if self.packing not in ("Light", "Dense"):
            raise ParseError(f"scene.packing must be Light|Dense, got {self.packing!r}")
        if self.count < 0:
            raise ParseError("scene.count must be >= 0")
        if not self.catalog:
            raise ParseError("scene.catalog must not be empty")


@dataclass(frozen=True)
class CameraConfig:
    intrinsics: CameraIntrinsics = field(
        default_factory=lambda: CameraIntrinsics(fx=600.0, fy=600.0, cx=320.0, cy=240.0,
                                                 width=640, height=480))
    pose_height: float = 0.70

    def __post_init__(self) -> None:
        if self.pose_height <= 0:
            raise ParseError("camera.pose_height must be positive")


@dataclass(frozen=True)
class TimingConfig:
    """Emulated per-stage clock charges in simulated milliseconds."""

    preprocess_ms: float = 15.0
    detect_ms: float = 350.0
    grasp_ms: float = 70.0
    scan_ms: float = 10.0
    link_latency_ms: float = 1.0
    link_jitter_ms: float = 0.0
    heartbeat_period_ms: float = 250.0
    stage_timeout_ms: float = 2000.0
    motion_timeout_ms: float = 30000.0

    def __post_init__(self) -> None:
        for name in ("preprocess_ms", "detect_ms", "grasp_ms", "scan_ms",
                     "link_latency_ms", "link_jitter_ms", "heartbeat_period_ms",
                     "stage_timeout_ms", "motion_timeout_ms"):
            if getattr(self, name) < 0:
                raise ParseError(f"timing.{name} must be >= 0")
        if self.scan_ms <= 0:
            raise ParseError("timing.scan_ms must be positive")


@dataclass(frozen=True)
class BinsConfig:
    placement: str = "near"
    near_distance_m: float = 0.25
    far_distance_m: float = 0.90

    def __post_init__(self) -> None:
        if self.placement not in ("near", "far"):
            raise ParseError("bins.placement must be near|far")
        if self.near_distance_m <= 0 or self.far_distance_m <= 0:
            raise ParseError("bin distances must be positive")

    @property
    def place_distance_m(self) -> float:
        return self.near_distance_m if self.placement == "near" else self.far_distance_m


@dataclass(frozen=True)
class PlannerSection:
    stride: int = 4
    angular_bins: int = 16
    delta_edge: float = 0.008
    margin: float = 0.05
    crop_pad_px: int = 48
    crop_size_px: int = 96

    def to_planner_config(self) -> PlannerConfig:
        return PlannerConfig(delta_edge=self.delta_edge, margin=self.margin,
                             stride=self.stride, angular_bins=self.angular_bins)

    def __post_init__(self) -> None:
        if self.stride < 1 or self.angular_bins < 1:
            raise ParseError("planner stride and angular_bins must be >= 1")
        if self.crop_size_px < 16:
            raise ParseError("planner.crop_size_px too small")


@dataclass(frozen=True)
class RunConfig:
    scene: SceneConfig = field(default_factory=SceneConfig)
    request: dict = field(default_factory=dict)  # empty -> one of each present class
    bin_dims: BinDims = field(default_factory=BinDims)
    noise: NoiseParams = field(default_factory=NoiseParams)
    detector: DetectorParams = field(default_factory=DetectorParams)
    gripper: GripperParams = field(default_factory=GripperParams)
    camera: CameraConfig = field(default_factory=CameraConfig)
    robot_bin_center: tuple[float, float, float] = (0.40, 0.0, 0.0)
    motion: MotionProfile = field(default_factory=MotionProfile)
    timing: TimingConfig = field(default_factory=TimingConfig)
    bins: BinsConfig = field(default_factory=BinsConfig)
    planner: PlannerSection = field(default_factory=PlannerSection)
    slip_rate: float = 0.03
    episodes: int = 1
    pick_cap_factor: int = 4
    n_frames_unavailable: int = 3

    def __post_init__(self) -> None:
        if not (0.0 <= self.slip_rate <= 1.0):
            raise ParseError("slip_rate must lie in [0, 1]")
        if self.episodes < 1:
            raise ParseError("episodes must be >= 1")
        if self.pick_cap_factor < 1:
            raise ParseError("pick_cap_factor must be >= 1")
        for label, n in self.request.items():
            if not isinstance(n, int) or n < 0:
                raise ParseError(f"request count for {label!r} must be a non-negative integer")

    def resolved_dict(self) -> dict:
        return {
            "scene": {"catalog": list(self.scene.catalog), "count": self.scene.count,
                      "packing": self.scene.packing, "seed": self.scene.seed},
            "request": dict(self.request),
            "bin_dims": {"length": self.bin_dims.length, "width": self.bin_dims.width,
                         "depth": self.bin_dims.depth},
            "noise": {"sigma_base": self.noise.sigma_base, "grid_pitch": self.noise.grid_pitch,
                      "hole_rate": self.noise.hole_rate,
                      "hole_blob_radius": self.noise.hole_blob_radius,
                      "edge_hole_boost": self.noise.edge_hole_boost},
            "detector": {"miss_curve": [[o, p] for o, p in self.detector.miss_curve],
                         "jitter_sigma": self.detector.jitter_sigma,
                         "merge_iou_threshold": self.detector.merge_iou_threshold,
                         "seed": self.detector.seed},
            "gripper": {"max_opening": self.gripper.max_opening,
                        "jaw_thickness": self.gripper.jaw_thickness,
                        "jaw_width": self.gripper.jaw_width,
                        "insertion_depth": self.gripper.insertion_depth},
            "camera": {"intrinsics": self.camera.intrinsics.to_dict(),
                       "pose_height": self.camera.pose_height},
            "robot_bin_center": list(self.robot_bin_center),
            "motion": {"max_speed": self.motion.max_speed, "accel": self.motion.accel,
                       "grip_close_s": self.motion.grip_close_s,
                       "grip_open_s": self.motion.grip_open_s,
                       "settle_s": self.motion.settle_s},
            "timing": {"preprocess_ms": self.timing.preprocess_ms,
                       "detect_ms": self.timing.detect_ms,
                       "grasp_ms": self.timing.grasp_ms,
                       "scan_ms": self.timing.scan_ms,
                       "link_latency_ms": self.timing.link_latency_ms,
                       "link_jitter_ms": self.timing.link_jitter_ms,
                       "heartbeat_period_ms": self.timing.heartbeat_period_ms,
                       "stage_timeout_ms": self.timing.stage_timeout_ms,
                       "motion_timeout_ms": self.timing.motion_timeout_ms},
            "bins": {"placement": self.bins.placement,
                     "near_distance_m": self.bins.near_distance_m,
                     "far_distance_m": self.bins.far_distance_m},
            "planner": {"stride": self.planner.stride,
                        "angular_bins": self.planner.angular_bins,
                        "delta_edge": self.planner.delta_edge,
                        "margin": self.planner.margin,
                        "crop_pad_px": self.planner.crop_pad_px,
                        "crop_size_px": self.planner.crop_size_px},
            "slip_rate": self.slip_rate,
            "episodes": self.episodes,
            "pick_cap_factor": self.pick_cap_factor,
            "n_frames_unavailable": self.n_frames_unavailable,
        }

    def config_hash(self) -> str:
        return hashlib.sha256(canonjson.dumps(self.resolved_dict()).encode()).hexdigest()


def _take(d: dict, section: str, known: set[str]) -> None:
    unknown = set(d) - known
    if unknown:
        raise UnknownKey(f"unknown key(s) in {section}: {', '.join(sorted(unknown))}")


def _build(raw: dict) -> RunConfig:
    _take(raw, "config", {"scene", "request", "bin_dims", "noise", "detector", "gripper",
                          "camera", "robot_bin_center", "motion", "timing", "bins",
                          "planner", "slip_rate", "episodes", "pick_cap_factor",
                          "n_frames_unavailable"})

    def sect(name: str) -> dict:
        v = raw.get(name, {}) or {}
        if not isinstance(v, dict):
            raise ParseError(f"{name} must be a mapping")
        return v

    try:
        s = sect("scene")
        _take(s, "scene", {"catalog", "count", "packing", "seed"})
        scene = SceneConfig(catalog=tuple(s.get("catalog", SceneConfig.catalog)),
                            count=int(s.get("count", 6)),
                            packing=str(s.get("packing", "Light")),
                            seed=int(s.get("seed", 7)))

        b = sect("bin_dims")
        _take(b, "bin_dims", {"length", "width", "depth"})
        bd = BinDims(length=float(b.get("length", 0.45)), width=float(b.get("width", 0.25)),
                     depth=float(b.get("depth", 0.08)))

        n = sect("noise")
        _take(n, "noise", {"sigma_base", "grid_pitch", "hole_rate", "hole_blob_radius",
                           "edge_hole_boost"})
        noise = NoiseParams(sigma_base=float(n.get("sigma_base", 0.003)),
                            grid_pitch=int(n.get("grid_pitch", 8)),
                            hole_rate=float(n.get("hole_rate", 0.04)),
                            hole_blob_radius=int(n.get("hole_blob_radius", 2)),
                            edge_hole_boost=float(n.get("edge_hole_boost", 4.0)))

        de = sect("detector")
        _take(de, "detector", {"miss_curve", "jitter_sigma", "merge_iou_threshold", "seed"})
        defaults = DetectorParams()
        curve = de.get("miss_curve")
        detector = DetectorParams(
            miss_curve=tuple((float(o), float(p)) for o, p in curve) if curve
            else defaults.miss_curve,
            jitter_sigma=float(de.get("jitter_sigma", defaults.jitter_sigma)),
            merge_iou_threshold=float(de.get("merge_iou_threshold",
                                             defaults.merge_iou_threshold)),
            seed=int(de.get("seed", 0)))

        g = sect("gripper")
        _take(g, "gripper", {"max_opening", "jaw_thickness", "jaw_width", "insertion_depth"})
        gd = GripperParams()
        gripper = GripperParams(max_opening=float(g.get("max_opening", gd.max_opening)),
                                jaw_thickness=float(g.get("jaw_thickness", gd.jaw_thickness)),
                                jaw_width=float(g.get("jaw_width", gd.jaw_width)),
                                insertion_depth=float(g.get("insertion_depth",
                                                            gd.insertion_depth)))

        c = sect("camera")
        _take(c, "camera", {"intrinsics", "pose_height"})
        intr = c.get("intrinsics", {}) or {}
        _take(intr, "camera.intrinsics", {"fx", "fy", "cx", "cy", "width", "height"})
        default_intr = CameraConfig().intrinsics
        intrinsics = CameraIntrinsics(fx=float(intr.get("fx", default_intr.fx)),
                                      fy=float(intr.get("fy", default_intr.fy)),
                                      cx=float(intr.get("cx", default_intr.cx)),
                                      cy=float(intr.get("cy", default_intr.cy)),
                                      width=int(intr.get("width", default_intr.width)),
                                      height=int(intr.get("height", default_intr.height)))
        camera = CameraConfig(intrinsics=intrinsics,
                              pose_height=float(c.get("pose_height", 0.70)))

        m = sect("motion")
        _take(m, "motion", {"max_speed", "accel", "grip_close_s", "grip_open_s", "settle_s"})
        md = MotionProfile()
        motion = MotionProfile(max_speed=float(m.get("max_speed", md.max_speed)),
                               accel=float(m.get("accel", md.accel)),
                               grip_close_s=float(m.get("grip_close_s", md.grip_close_s)),
                               grip_open_s=float(m.get("grip_open_s", md.grip_open_s)),
                               settle_s=float(m.get("settle_s", md.settle_s)))

        t = sect("timing")
        _take(t, "timing", {"preprocess_ms", "detect_ms", "grasp_ms", "scan_ms",
                            "link_latency_ms", "link_jitter_ms", "heartbeat_period_ms",
                            "stage_timeout_ms", "motion_timeout_ms"})
        td = TimingConfig()
        timing = TimingConfig(
            preprocess_ms=float(t.get("preprocess_ms", td.preprocess_ms)),
            detect_ms=float(t.get("detect_ms", td.detect_ms)),
            grasp_ms=float(t.get("grasp_ms", td.grasp_ms)),
            scan_ms=float(t.get("scan_ms", td.scan_ms)),
            link_latency_ms=float(t.get("link_latency_ms", td.link_latency_ms)),
            link_jitter_ms=float(t.get("link_jitter_ms", td.link_jitter_ms)),
            heartbeat_period_ms=float(t.get("heartbeat_period_ms", td.heartbeat_period_ms)),
            stage_timeout_ms=float(t.get("stage_timeout_ms", td.stage_timeout_ms)),
            motion_timeout_ms=float(t.get("motion_timeout_ms", td.motion_timeout_ms)))

        bi = sect("bins")
        _take(bi, "bins", {"placement", "near_distance_m", "far_distance_m"})
        bins = BinsConfig(placement=str(bi.get("placement", "near")),
                          near_distance_m=float(bi.get("near_distance_m", 0.25)),
                          far_distance_m=float(bi.get("far_distance_m", 0.90)))

        p = sect("planner")
        _take(p, "planner", {"stride", "angular_bins", "delta_edge", "margin",
                             "crop_pad_px", "crop_size_px"})
        pd = PlannerSection()
        planner = PlannerSection(stride=int(p.get("stride", pd.stride)),
                                 angular_bins=int(p.get("angular_bins", pd.angular_bins)),
                                 delta_edge=float(p.get("delta_edge", pd.delta_edge)),
                                 margin=float(p.get("margin", pd.margin)),
                                 crop_pad_px=int(p.get("crop_pad_px", pd.crop_pad_px)),
                                 crop_size_px=int(p.get("crop_size_px", pd.crop_size_px)))

        request_raw = raw.get("request", {}) or {}
        if not isinstance(request_raw, dict):
            raise ParseError("request must be a mapping of class label to count")
        request = {str(k): int(v) for k, v in request_raw.items()}

        rbc = raw.get("robot_bin_center", (0.40, 0.0, 0.0))
        if not (isinstance(rbc, (list, tuple)) and len(rbc) == 3):
            raise ParseError("robot_bin_center must be [x, y, z]")

        return RunConfig(scene=scene, request=request, bin_dims=bd, noise=noise,
                         detector=detector, gripper=gripper, camera=camera,
                         robot_bin_center=tuple(float(x) for x in rbc),
                         motion=motion, timing=timing, bins=bins, planner=planner,
                         slip_rate=float(raw.get("slip_rate", 0.03)),
                         episodes=int(raw.get("episodes", 1)),
                         pick_cap_factor=int(raw.get("pick_cap_factor", 4)),
                         n_frames_unavailable=int(raw.get("n_frames_unavailable", 3)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    """Parse YAML; an empty file yields all defaults."""
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ParseError("top-level config must be a mapping")
    return _build(raw)


def config_from_dict(raw: dict) -> RunConfig:
    return _build(raw)
