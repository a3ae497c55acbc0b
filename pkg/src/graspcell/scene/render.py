"""Overhead depth rendering and ground-truth annotation.

The world is an infinite floor plane at z=0 carrying posed heightmap patches;
the bin itself is a logical rectangle used for placement and bounds checks.
Rendering inverts the pinhole projection per pixel with a short fixed-point
iteration (ample for scenes a few centimeters tall under a camera ~0.7 m up).
"""

from __future__ import annotations

import numpy as np

from .noise import sample_gp_noise, sample_hole_mask
from .raster import RasterScene, rasterize_scene
from .types import (
    HOLE_SENTINEL,
    CameraIntrinsics,
    CameraPose,
    DepthFrame,
    GroundTruthEntry,
    NoiseParams,
    Scene,
)


def default_camera_pose(scene: Scene, height: float = 0.70) -> CameraPose:
    return CameraPose(x=scene.bin_dims.length / 2.0, y=scene.bin_dims.width / 2.0, height=height)


def _project_surface(raster: RasterScene, cam: CameraIntrinsics, pose: CameraPose,
                     iterations: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel depth and owner index via inverse pinhole lookup."""
    us, vs = np.meshgrid(np.arange(cam.width, dtype=np.float64),
                         np.arange(cam.height, dtype=np.float64))
    z = np.full(us.shape, pose.height)
    i = np.zeros(us.shape, dtype=np.int64)
    j = np.zeros(us.shape, dtype=np.int64)
    inside = np.zeros(us.shape, dtype=bool)
    for _ in range(iterations):
        x = pose.x + (us - cam.cx) * z / cam.fx
        y = pose.y + (vs - cam.cy) * z / cam.fy
        i, j, inside = raster.geom.cell_index(x.ravel(), y.ravel())
        i, j, inside = i.reshape(us.shape), j.reshape(us.shape), inside.reshape(us.shape)
        h = np.zeros(us.shape)
        h[inside] = raster.surface[j[inside], i[inside]]
        z = pose.height - h

    owner_img = np.full(us.shape, -1, dtype=np.int64)
    owner_img[inside] = raster.owner[j[inside], i[inside]]
    return z, owner_img


def render_clean_depth(scene: Scene, cam: CameraIntrinsics, pose: CameraPose | None = None,
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Noiseless depth image plus the per-pixel object-owner index image."""
    pose = pose or default_camera_pose(scene)
    raster = rasterize_scene(scene)
    return _project_surface(raster, cam, pose)


def render_depth(scene: Scene, cam: CameraIntrinsics, pose: CameraPose | None = None,
                 noise: NoiseParams | None = None, seed: int = 0) -> DepthFrame:
    """Render the noisy sensor view: clean projection + bulge field + holes."""
    pose = pose or default_camera_pose(scene)
    noise = noise or NoiseParams.zero()
    depth, _ = render_clean_depth(scene, cam, pose)

    field = sample_gp_noise(seed, cam.width, cam.height, noise)
    noisy = depth + field
    holes = sample_hole_mask(seed, depth, noise)

    data = np.where(holes, HOLE_SENTINEL, noisy)
    return DepthFrame(data=data, valid=~holes, intrinsics_ref="default")


def render_frame(scene: Scene, cam: CameraIntrinsics, pose: CameraPose | None = None,
                 noise: NoiseParams | None = None, seed: int = 0,
                 ) -> tuple[DepthFrame, list[GroundTruthEntry]]:
    """Noisy depth frame plus ground truth from a single projection pass."""
    pose = pose or default_camera_pose(scene)
    noise = noise or NoiseParams.zero()
    raster = rasterize_scene(scene)
    depth, owner_img = _project_surface(raster, cam, pose)

    field = sample_gp_noise(seed, cam.width, cam.height, noise)
    holes = sample_hole_mask(seed, depth, noise)
    data = np.where(holes, HOLE_SENTINEL, depth + field)
    frame = DepthFrame(data=data, valid=~holes, intrinsics_ref="default")
    return frame, _ground_truth_entries(scene, raster, owner_img)


def _ground_truth_entries(scene: Scene, raster: RasterScene,
                          owner_img: np.ndarray) -> list[GroundTruthEntry]:
    n = len(scene.objects)
    covered_by_later = np.zeros(raster.shape, dtype=bool)
    covered_counts = [0] * n
    totals = [int(raster.occupancy[k].sum()) for k in range(n)]
    for k in range(n - 1, -1, -1):
        covered_counts[k] = int((raster.occupancy[k] & covered_by_later).sum())
        covered_by_later |= raster.occupancy[k]

    entries: list[GroundTruthEntry] = []
    for k, obj in enumerate(scene.objects):
        total = totals[k]
        occl = (covered_counts[k] / total) if total else 1.0
        vs, us = np.nonzero(owner_img == k)
        if us.size == 0:
            entries.append(GroundTruthEntry(obj.id, obj.class_label, None, 1.0, degenerate=True))
            continue
        box = (float(us.min()), float(vs.min()), float(us.max() + 1), float(vs.max() + 1))
        entries.append(GroundTruthEntry(obj.id, obj.class_label, box, float(occl)))
    return entries


def render_ground_truth(scene: Scene, cam: CameraIntrinsics, pose: CameraPose | None = None,
                        ) -> list[GroundTruthEntry]:
    """Tight visible-footprint boxes and cell-level occlusion fractions."""
    pose = pose or default_camera_pose(scene)
    raster = rasterize_scene(scene)
    _, owner_img = _project_surface(raster, cam, pose)
    return _ground_truth_entries(scene, raster, owner_img)
