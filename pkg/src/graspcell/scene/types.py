"""Core world-model types: objects, scenes, depth frames, grasp outcomes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

# Depth value stored in invalid (hole) cells.  Never read as a depth.
HOLE_SENTINEL = 0.0

# Upper bound on any plausible depth in this cell (meters).
MAX_DEPTH_M = 10.0


@dataclass(frozen=True)
class BinDims:
    """Bin interior size in meters."""

    length: float = 0.45
    width: float = 0.25
    depth: float = 0.08

    def __post_init__(self) -> None:
        if min(self.length, self.width, self.depth) <= 0:
            raise ValueError("bin dimensions must be positive")


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")

    def to_dict(self) -> dict:
        return {
            "fx": float(self.fx),
            "fy": float(self.fy),
            "cx": float(self.cx),
            "cy": float(self.cy),
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraIntrinsics":
        return cls(
            fx=float(d["fx"]),
            fy=float(d["fy"]),
            cx=float(d["cx"]),
            cy=float(d["cy"]),
            width=int(d["width"]),
            height=int(d["height"]),
        )


@dataclass(frozen=True)
class CameraPose:
    """Fixed overhead capture pose: optical axis straight down (+z into the bin).

    x, y locate the optical axis in the bin frame; height is the distance from
    the bin floor to the optical center.  Image x runs along bin +x, image y
    along bin +y.
    """

    x: float
    y: float
    height: float

    def __post_init__(self) -> None:
        if self.height <= 0:
            raise ValueError("camera height must be positive")


@dataclass(frozen=True)
class NoiseParams:
    """Depth sensor noise model: correlated bulge field plus hole blobs."""

    sigma_base: float = 0.003
    grid_pitch: int = 8
    hole_rate: float = 0.04
    hole_blob_radius: int = 2
    edge_hole_boost: float = 4.0

    def __post_init__(self) -> None:
        if self.sigma_base < 0 or self.hole_rate < 0 or self.hole_blob_radius < 0:
            raise ValueError("noise parameters must be non-negative")
        if self.edge_hole_boost < 0:
            raise ValueError("edge_hole_boost must be non-negative")
        if self.grid_pitch < 1:
            raise ValueError("grid_pitch must be >= 1")
        if self.hole_rate > 0.5:
            raise ValueError("hole_rate must be <= 0.5")

    @classmethod
    def zero(cls) -> "NoiseParams":
        return cls(sigma_base=0.0, grid_pitch=8, hole_rate=0.0, hole_blob_radius=0, edge_hole_boost=0.0)


@dataclass(frozen=True)
class GripperParams:
    """Parallel-jaw gripper geometry (85 mm class two-finger gripper).

    insertion_depth is how far the jaw tips descend below the grasp contact
    plane; keeping it at the planner's edge threshold leaves dome-topped
    objects graspable while rejecting jaws landing on solid material.
    """

    max_opening: float = 0.085
    jaw_thickness: float = 0.010
    jaw_width: float = 0.022
    insertion_depth: float = 0.008

    def __post_init__(self) -> None:
        if min(self.max_opening, self.jaw_thickness, self.jaw_width, self.insertion_depth) <= 0:
            raise ValueError("gripper parameters must be positive")
        if self.max_opening <= 2 * self.jaw_thickness:
            raise ValueError("max_opening must exceed twice the jaw thickness")


@dataclass
class SceneObject:
    """One rigid item in the bin, modeled as a posed heightmap patch.

    footprint[j, i] is the height in meters above the bin floor of the cell
    at object-frame position (i, j); zero cells are empty.  The patch is
    centered on the pose point and rotated by yaw.
    """

    id: int
    class_label: str
    pose: tuple[float, float, float]  # (x m, y m, yaw rad) in bin frame
    footprint: np.ndarray
    cell_size: float
    graspable_width_mm: float

    def __post_init__(self) -> None:
        self.footprint = np.asarray(self.footprint, dtype=np.float64)
        if self.footprint.ndim != 2:
            raise ValueError("footprint must be a 2-D grid")
        if (self.footprint < 0).any():
            raise ValueError("footprint heights must be >= 0")
        if self.cell_size <= 0:
            raise ValueError("cell_size must be positive")

    @property
    def extent(self) -> tuple[float, float]:
        """Object-frame (x, y) side lengths of the footprint patch in meters."""
        h, w = self.footprint.shape
        return (w * self.cell_size, h * self.cell_size)

    @property
    def max_height(self) -> float:
        return float(self.footprint.max()) if self.footprint.size else 0.0


@dataclass
class Scene:
    """Ground-truth bin contents.  Objects later in the list sit on top of
    (and occlude) earlier ones where their footprints overlap."""

    bin_dims: BinDims
    objects: list[SceneObject] = field(default_factory=list)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        ids = [o.id for o in self.objects]
        if len(ids) != len(set(ids)):
            raise ValueError("object ids must be unique within a scene")

    def object_by_id(self, object_id: int) -> SceneObject | None:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        return None

    def remove_object(self, object_id: int) -> None:
        self.objects = [o for o in self.objects if o.id != object_id]

    def class_labels(self) -> list[str]:
        seen: list[str] = []
        for obj in self.objects:
            if obj.class_label not in seen:
                seen.append(obj.class_label)
        return seen


@dataclass(frozen=True)
class PixelTransform:
    """Affine map from this frame's pixel coordinates back to sensor pixels.

    sensor_u = offset_u + frame_u / scale_u, and the same for v.  A scale
    above 1 means the frame is an upscaled view of its source window.
    """

    offset_u: float = 0.0
    offset_v: float = 0.0
    scale_u: float = 1.0
    scale_v: float = 1.0

    @property
    def uniform_scale(self) -> float:
        if abs(self.scale_u - self.scale_v) > 1e-9:
            raise ValueError("frame transform has non-uniform scale")
        return self.scale_u

    def to_sensor(self, u: float, v: float) -> tuple[float, float]:
        return (self.offset_u + u / self.scale_u, self.offset_v + v / self.scale_v)

    def from_sensor(self, u: float, v: float) -> tuple[float, float]:
        return ((u - self.offset_u) * self.scale_u, (v - self.offset_v) * self.scale_v)

    def compose(self, inner: "PixelTransform") -> "PixelTransform":
        """Transform for a frame derived from this one via `inner`."""
        return PixelTransform(
            offset_u=self.offset_u + inner.offset_u / self.scale_u,
            offset_v=self.offset_v + inner.offset_v / self.scale_v,
            scale_u=self.scale_u * inner.scale_u,
            scale_v=self.scale_v * inner.scale_v,
        )


@dataclass
class DepthFrame:
    """H x W depth grid in meters with a validity mask (False = hole)."""

    data: np.ndarray
    valid: np.ndarray
    intrinsics_ref: str = "default"
    transform: PixelTransform = field(default_factory=PixelTransform)

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.data.shape != self.valid.shape or self.data.ndim != 2:
            raise ValueError("data and valid must be matching 2-D grids")
        vals = self.data[self.valid]
        if vals.size and (vals.size and ((vals <= 0) | (vals >= MAX_DEPTH_M)).any()):
            raise ValueError("valid depths must lie in (0, 10) meters")

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    def copy(self) -> "DepthFrame":
        return DepthFrame(
            data=self.data.copy(),
            valid=self.valid.copy(),
            intrinsics_ref=self.intrinsics_ref,
            transform=self.transform,
        )


@dataclass(frozen=True)
class GroundTruthEntry:
    """Per-object annotation: tight box over the visible footprint pixels."""

    object_id: int
    class_label: str
    box: tuple[float, float, float, float] | None  # (u_min, v_min, u_max, v_max)
    occlusion: float
    degenerate: bool = False


@dataclass(frozen=True)
class WorldGrasp:
    """Top-down parallel-jaw grasp in the bin frame."""

    x: float
    y: float
    z: float
    yaw: float


class FailureReason(enum.Enum):
    WIDTH_EXCEEDED = "WidthExceeded"
    POOR_ALIGNMENT = "PoorAlignment"
    COLLISION_WITH_NEIGHBOR = "CollisionWithNeighbor"
    RANDOM_SLIP = "RandomSlip"
    EMPTY_CLOSURE = "EmptyClosure"


@dataclass(frozen=True)
class GraspOutcome:
    success: bool
    removed_object_id: int | None = None
    failure_reason: FailureReason | None = None
    grasped_width_m: float = 0.0

    def __post_init__(self) -> None:
        if self.success and self.removed_object_id is None:
            raise ValueError("successful outcome must name the removed object")
        if not self.success and self.failure_reason is None:
            raise ValueError("failed outcome must carry a reason")
