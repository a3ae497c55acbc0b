from .types import (
    BoundingBox,
    Detection,
    DetectorParams,
    GraspCandidate,
    GraspMap,
)
from .preprocess import BadBox, BadRoi, crop_to_box, preprocess_depth
from .inpaint import AllHoles, inpaint
from .detector import detect
from .selection import pairwise_overlap_score, select_object, select_object_index
from .planner import NoFeasibleGrasp, PlannerConfig, grasp_quality, plan_grasp
from .overlay import render_overlay_png

__all__ = [
    "BoundingBox",
    "Detection",
    "DetectorParams",
    "GraspCandidate",
    "GraspMap",
    "BadBox",
    "BadRoi",
    "crop_to_box",
    "preprocess_depth",
    "AllHoles",
    "inpaint",
    "detect",
    "pairwise_overlap_score",
    "select_object",
    "select_object_index",
    "NoFeasibleGrasp",
    "PlannerConfig",
    "grasp_quality",
    "plan_grasp",
    "render_overlay_png",
]
