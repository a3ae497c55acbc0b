"""Grasp outcome adjudication against noiseless ground truth.

A grasp is judged in 2.5-D on the rasterized scene: the closing axis must
cross exactly one object, that object's cross-section must fit the opening
with margin, and the jaw landing zones must be clear of neighbors.  A
Bernoulli slip models residual execution failures.
"""

from __future__ import annotations

import numpy as np

from .raster import RasterScene, rasterize_scene
from .types import FailureReason, GraspOutcome, GripperParams, Scene, WorldGrasp

WIDTH_MARGIN_M = 0.004
CLEARANCE_M = 0.005
AXIS_STEP_M = 0.001


class OutOfBounds(ValueError):
    """Grasp point outside the bin rectangle."""


def _objects_at(raster: RasterScene, pts_x: np.ndarray, pts_y: np.ndarray) -> list[np.ndarray]:
    """Per-object boolean coverage of the query points."""
    i, j, inside = raster.geom.cell_index(pts_x, pts_y)
    i = np.clip(i, 0, raster.geom.nx - 1)
    j = np.clip(j, 0, raster.geom.ny - 1)
    out = []
    for occ in raster.occupancy:
        hit = occ[j, i] & inside
        out.append(hit)
    return out


def _evaluate_grasp(raster: RasterScene, scene: Scene, grasp: WorldGrasp,
                    gripper: GripperParams) -> tuple[bool, FailureReason | None, int, float]:
    """Conditions (axis crossing, width fit, jaw clearance) sans slip.

    Returns (ok, reason, object_index, grasped_width_m).
    """
    d = np.array([np.cos(grasp.yaw), np.sin(grasp.yaw)])
    n = np.array([-d[1], d[0]])
    half = gripper.max_opening / 2.0
    ts = np.arange(-half, half + AXIS_STEP_M / 2, AXIS_STEP_M)
    axis_x = grasp.x + ts * d[0]
    axis_y = grasp.y + ts * d[1]

    coverage = _objects_at(raster, axis_x, axis_y)
    crossed = [k for k, hit in enumerate(coverage) if hit.any()]
    if not crossed:
        return False, FailureReason.EMPTY_CLOSURE, -1, 0.0
    if len(crossed) > 1:
        return False, FailureReason.POOR_ALIGNMENT, -1, 0.0

    k = crossed[0]
    covered_ts = ts[coverage[k]]
    t_lo = float(covered_ts.min())
    t_hi = float(covered_ts.max())
    width = (t_hi - t_lo) + AXIS_STEP_M
    if width > gripper.max_opening - WIDTH_MARGIN_M:
        return False, FailureReason.WIDTH_EXCEEDED, k, width

    # jaw landing zones just outside the measured extent, inflated by the
    # clearance margin, must touch no other object's footprint
    jt = gripper.jaw_thickness
    jw = gripper.jaw_width
    t_steps = np.arange(0.0, jt + CLEARANCE_M + AXIS_STEP_M / 2, AXIS_STEP_M)
    s_half = jw / 2 + CLEARANCE_M
    s_steps = np.arange(-s_half, s_half + AXIS_STEP_M / 2, AXIS_STEP_M)
    tt, ss = np.meshgrid(t_steps, s_steps)
    for sign, edge in ((-1.0, t_lo), (1.0, t_hi)):
        zt = edge + sign * tt
        zx = grasp.x + zt * d[0] + ss * n[0]
        zy = grasp.y + zt * d[1] + ss * n[1]
        zone_cov = _objects_at(raster, zx.ravel(), zy.ravel())
        for other, hit in enumerate(zone_cov):
            if other != k and hit.any():
                return False, FailureReason.COLLISION_WITH_NEIGHBOR, k, width

    return True, None, k, width


def apply_grasp(scene: Scene, grasp: WorldGrasp, gripper: GripperParams,
                slip_rate: float = 0.0, seed: int = 0) -> GraspOutcome:
    """Adjudicate and, on success, remove the grasped object from the scene."""
    if not (0.0 <= grasp.x <= scene.bin_dims.length and 0.0 <= grasp.y <= scene.bin_dims.width):
        raise OutOfBounds(f"grasp ({grasp.x:.3f}, {grasp.y:.3f}) outside bin")

    raster = rasterize_scene(scene)
    ok, reason, k, width = _evaluate_grasp(raster, scene, grasp, gripper)
    if not ok:
        return GraspOutcome(success=False, failure_reason=reason)

    if slip_rate > 0.0:
        rng = np.random.default_rng([seed, 0x51100])
        if rng.random() < slip_rate:
            return GraspOutcome(success=False, failure_reason=FailureReason.RANDOM_SLIP)

    obj = scene.objects[k]
    scene.remove_object(obj.id)
    return GraspOutcome(success=True, removed_object_id=obj.id, grasped_width_m=width)


def find_feasible_grasp(scene: Scene, object_id: int, gripper: GripperParams,
                        angles: int = 16, candidate_stride: int = 6,
                        raster: RasterScene | None = None) -> WorldGrasp | None:
    """Search for any grasp on `object_id` passing the adjudication geometry.

    Candidate centers are the object's occupied cells (subsampled) starting
    with the centroid; angles sweep half a turn.  Returns the first feasible
    grasp or None.
    """
    raster = raster if raster is not None else rasterize_scene(scene)
    idx = next((k for k, o in enumerate(scene.objects) if o.id == object_id), None)
    if idx is None:
        return None
    occ = raster.occupancy[idx]
    js, is_ = np.nonzero(occ)
    if js.size == 0:
        return None
    xs, ys = raster.geom.cell_centers()
    cand_x = [float(xs[is_].mean())] + list(xs[is_[::candidate_stride]])
    cand_y = [float(ys[js].mean())] + list(ys[js[::candidate_stride]])

    bd = scene.bin_dims
    for cx, cy in zip(cand_x, cand_y):
        if not (0.0 <= cx <= bd.length and 0.0 <= cy <= bd.width):
            continue
        i, j, inside = raster.geom.cell_index(np.array([cx]), np.array([cy]))
        top = float(raster.heights[idx][j[0], i[0]]) if inside[0] else 0.0
        for a in range(angles):
            yaw = np.pi * a / angles
            grasp = WorldGrasp(x=cx, y=cy, z=max(0.0, top - gripper.insertion_depth / 2), yaw=yaw)
            ok, _, k, _ = _evaluate_grasp(raster, scene, grasp, gripper)
            if ok and k == idx:
                return grasp
    return None
