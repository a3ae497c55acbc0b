"""Deterministic crop fixtures for planner behavior tests.

All crops are 96x96, floor at 0.70 m, built for a camera with fx = 400 so an
85 mm opening spans ~50 px at object depth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graspcell.perception import BoundingBox, inpaint
from graspcell.scene.types import CameraIntrinsics, DepthFrame

CROP_CAM = CameraIntrinsics(fx=400.0, fy=400.0, cx=48.0, cy=48.0, width=96, height=96)
FLOOR_Z = 0.70
SIZE = 96


def flat_crop() -> DepthFrame:
    return DepthFrame(data=np.full((SIZE, SIZE), FLOOR_Z), valid=np.ones((SIZE, SIZE), bool))


def _px(meters: float, z: float) -> int:
    return int(round(CROP_CAM.fx * meters / z))


def block_crop(width_mm: float, depth_mm: float | None = None, height_mm: float = 40.0,
               cu: int = SIZE // 2, cv: int = SIZE // 2) -> DepthFrame:
    """Rectangular block centered at (cu, cv)."""
    depth_mm = depth_mm if depth_mm is not None else width_mm
    data = np.full((SIZE, SIZE), FLOOR_Z)
    z_obj = FLOOR_Z - height_mm / 1000.0
    hw = _px(width_mm / 1000.0, z_obj) // 2
    hh = _px(depth_mm / 1000.0, z_obj) // 2
    data[cv - hh:cv + hh, cu - hw:cu + hw] = z_obj
    return DepthFrame(data=data, valid=np.ones((SIZE, SIZE), bool))


@dataclass
class HammerFixture:
    crop: DepthFrame
    box: BoundingBox
    handle_box: BoundingBox  # pixel region of the handle


def hammer_crop(with_walls: bool) -> HammerFixture:
    """T-shaped hammer, handle pointing up, head at the bottom.

    Without walls the handle (20 mm across) is the first feasible grasp in
    grid order.  With tall slabs flanking the handle, every handle grasp
    loses jaw clearance and the best grasp must move to the head.  The slabs
    run into the crop border so they are not graspable themselves (the
    outward edge search leaves the frame, and their long axis exceeds the
    opening).
    """
    data = np.full((SIZE, SIZE), FLOOR_Z)
    z_handle = FLOOR_Z - 0.022
    z_head = FLOOR_Z - 0.036
    z_wall = FLOOR_Z - 0.055

    handle_len = _px(0.100, z_handle)       # rows 8..67
    handle_w = _px(0.020, z_handle)         # ~12 px
    head_h = _px(0.032, z_head)             # ~19 px
    head_w = _px(0.055, z_head)             # ~33 px
    cu = SIZE // 2
    hr0 = 8
    data[hr0:hr0 + handle_len, cu - handle_w // 2:cu + handle_w // 2] = z_handle
    head_r0 = hr0 + handle_len
    data[head_r0:head_r0 + head_h, cu - head_w // 2:cu + head_w // 2] = z_head

    if with_walls:
        gap = _px(0.006, z_handle)
        data[4:56, 0:cu - handle_w // 2 - gap] = z_wall
        data[4:56, cu + handle_w // 2 + gap:SIZE] = z_wall

    frame = DepthFrame(data=data, valid=np.ones((SIZE, SIZE), bool))
    box = BoundingBox(float(cu - head_w // 2 - 2), float(hr0),
                      float(cu + head_w // 2 + 2), float(head_r0 + head_h + 2))
    handle_box = BoundingBox(float(cu - handle_w // 2 - 1), float(hr0),
                             float(cu + handle_w // 2 + 1), float(head_r0))
    return HammerFixture(crop=frame, box=box, handle_box=handle_box)


@dataclass
class BulgeFixture:
    raw: DepthFrame
    inpainted: DepthFrame
    box: BoundingBox
    hole_mask: np.ndarray


def bulge_crop() -> BulgeFixture:
    """Wide flat plate carrying a thin tall peg that a big hole blob almost
    swallows: only a 3x3 px island of the peg stays valid.  Diffusion inflates
    the island into a phantom dome over the plate.  The plate is too wide to
    grasp anywhere and the island misses every stride-4 grid center, so the
    planner's best grasp must land on former-hole pixels."""
    data = np.full((SIZE, SIZE), FLOOR_Z)
    z_plate = FLOOR_Z - 0.010
    z_peg = FLOOR_Z - 0.048

    data[10:86, 14:90] = z_plate      # plate far wider than the opening
    data[47:50, 53:56] = z_peg        # surviving peg pixels (off-grid)

    valid = np.ones((SIZE, SIZE), bool)
    yy, xx = np.mgrid[0:SIZE, 0:SIZE]
    hole = ((xx - 54.0) ** 2 + (yy - 48.0) ** 2) <= 12.0 ** 2
    hole[47:50, 53:56] = False        # the peg island stays valid
    valid[hole] = False

    raw = DepthFrame(data=np.where(valid, data, 0.0), valid=valid)
    filled = inpaint(raw)
    box = BoundingBox(15.0, 11.0, 89.0, 85.0)  # the plate's detection box
    return BulgeFixture(raw=raw, inpainted=filled, box=box, hole_mask=hole)
