from .types import (
    BinDims,
    CameraIntrinsics,
    CameraPose,
    DepthFrame,
    FailureReason,
    GraspOutcome,
    GripperParams,
    GroundTruthEntry,
    NoiseParams,
    PixelTransform,
    Scene,
    SceneObject,
    WorldGrasp,
)
from .catalog import DEFAULT_CATALOG, ObjectTemplate, build_template, default_catalog
from .generate import Packing, PlacementFailure, generate_bin
from .grasp_truth import OutOfBounds, apply_grasp, find_feasible_grasp
from .io import (
    depth_frame_from_png_bytes,
    depth_frame_to_png_bytes,
    scene_from_json,
    scene_to_canonical_json,
)
from .noise import sample_gp_noise, sample_hole_mask
from .raster import GridGeometry, RasterScene, rasterize_scene
from .render import default_camera_pose, render_clean_depth, render_depth, render_ground_truth

__all__ = [
    "BinDims",
    "CameraIntrinsics",
    "CameraPose",
    "DepthFrame",
    "FailureReason",
    "GraspOutcome",
    "GripperParams",
    "GroundTruthEntry",
    "NoiseParams",
    "PixelTransform",
    "Scene",
    "SceneObject",
    "WorldGrasp",
    "DEFAULT_CATALOG",
    "ObjectTemplate",
    "build_template",
    "default_catalog",
    "Packing",
    "PlacementFailure",
    "generate_bin",
    "OutOfBounds",
    "apply_grasp",
    "find_feasible_grasp",
    "depth_frame_from_png_bytes",
    "depth_frame_to_png_bytes",
    "scene_from_json",
    "scene_to_canonical_json",
    "sample_gp_noise",
    "sample_hole_mask",
    "GridGeometry",
    "RasterScene",
    "rasterize_scene",
    "default_camera_pose",
    "render_clean_depth",
    "render_depth",
    "render_ground_truth",
]
