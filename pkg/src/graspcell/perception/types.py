"""Perception-side domain types: detections, detector model, grasp results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel rectangle, max-exclusive: area = (u1-u0)*(v1-v0)."""

    u_min: float
    v_min: float
    u_max: float
    v_max: float

    def __post_init__(self) -> None:
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise ValueError("box must have positive extent")

    @property
    def area(self) -> float:
        return (self.u_max - self.u_min) * (self.v_max - self.v_min)

    @property
    def center(self) -> tuple[float, float]:
        return ((self.u_min + self.u_max) / 2, (self.v_min + self.v_max) / 2)

    def intersection_area(self, other: "BoundingBox") -> float:
        iw = min(self.u_max, other.u_max) - max(self.u_min, other.u_min)
        ih = min(self.v_max, other.v_max) - max(self.v_min, other.v_min)
        return iw * ih if (iw > 0 and ih > 0) else 0.0

    def iou(self, other: "BoundingBox") -> float:
        inter = self.intersection_area(other)
        if inter == 0.0:
            return 0.0
        return inter / (self.area + other.area - inter)

    def union_box(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            min(self.u_min, other.u_min), min(self.v_min, other.v_min),
            max(self.u_max, other.u_max), max(self.v_max, other.v_max))

    def contains(self, u: float, v: float) -> bool:
        return self.u_min <= u < self.u_max and self.v_min <= v < self.v_max

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.u_min, self.v_min, self.u_max, self.v_max)


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    class_label: str
    confidence: float
    merged_count: int = 1  # >1 when same-class boxes were fused into this one

    def __post_init__(self) -> None:
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError("confidence must lie in [0, 1]")


def default_confidence(occlusion: float, jitter_rms: float) -> float:
    score = 0.99 - 0.45 * occlusion - 0.01 * jitter_rms
    return float(np.clip(score, 0.05, 1.0))


@dataclass(frozen=True)
class DetectorParams:
    """Emulated object-detector behavior.

    miss_curve maps occlusion fraction to miss probability (piecewise linear,
    monotone non-decreasing, forced to 1.0 at occlusion 1.0).  Boxes that
    survive get corner jitter; same-class boxes above the IoU threshold merge
    into their union, reproducing the clustered-objects failure mode.
    """

    miss_curve: tuple[tuple[float, float], ...] = ((0.0, 0.02), (0.5, 0.30), (1.0, 1.0))
    jitter_sigma: float = 2.0
    merge_iou_threshold: float = 0.5
    seed: int = 0
    confidence_model: Callable[[float, float], float] = field(default=default_confidence)

    def __post_init__(self) -> None:
        occs = [o for o, _ in self.miss_curve]
        probs = [p for _, p in self.miss_curve]
        if sorted(occs) != list(occs):
            raise ValueError("miss_curve occlusions must be sorted ascending")
        if any(b < a for a, b in zip(probs, probs[1:])):
            raise ValueError("miss probability must be monotone non-decreasing")
        if occs[-1] != 1.0 or probs[-1] != 1.0:
            raise ValueError("miss probability must be 1.0 at occlusion 1.0")
        if not (0.0 <= self.merge_iou_threshold <= 1.0):
            raise ValueError("merge_iou_threshold must lie in [0, 1]")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")

    def miss_probability(self, occlusion: float) -> float:
        occs = np.array([o for o, _ in self.miss_curve])
        probs = np.array([p for _, p in self.miss_curve])
        return float(np.interp(occlusion, occs, probs))


@dataclass(frozen=True)
class GraspCandidate:
    """Pixel-frame grasp: center, planar axis angle in [0, pi), depth, quality."""

    u: int
    v: int
    theta: float
    z: float
    quality: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.quality <= 1.0):
            raise ValueError("quality must lie in [0, 1]")


@dataclass
class GraspMap:
    """Dense grasp-quality tensor over a crop plus the in-box argmax."""

    stride: int
    angular_bins: int
    us: np.ndarray  # grid center columns, len Wg
    vs: np.ndarray  # grid center rows, len Hg
    q: np.ndarray  # [Hg, Wg, K]
    best: GraspCandidate

    def to_dict(self) -> dict:
        return {
            "stride": self.stride,
            "angular_bins": self.angular_bins,
            "grid_height": int(self.q.shape[0]),
            "grid_width": int(self.q.shape[1]),
            "qualities": [float(x) for x in self.q.ravel()],
            "best": {
                "u": self.best.u,
                "v": self.best.v,
                "theta": float(self.best.theta),
                "z": float(self.best.z),
                "quality": float(self.best.quality),
            },
        }
