from __future__ import annotations

import numpy as np
import pytest

from graspcell.scene import (
    BinDims,
    CameraIntrinsics,
    GripperParams,
    Scene,
    SceneObject,
    default_catalog,
)


@pytest.fixture(scope="session")
def cam() -> CameraIntrinsics:
    return CameraIntrinsics(fx=600.0, fy=600.0, cx=320.0, cy=240.0, width=640, height=480)


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def gripper() -> GripperParams:
    return GripperParams()


def make_block_scene(width_m: float = 0.060, depth_m: float = 0.040, height_m: float = 0.040,
                     x: float = 0.225, y: float = 0.125, yaw: float = 0.0) -> Scene:
    """Single axis-aligned rectangular block centered in the default bin."""
    cell = 0.002
    fp = np.full((int(round(depth_m / cell)), int(round(width_m / cell))), height_m)
    obj = SceneObject(id=1, class_label="block", pose=(x, y, yaw), footprint=fp,
                      cell_size=cell, graspable_width_mm=min(width_m, depth_m) * 1000)
    return Scene(bin_dims=BinDims(), objects=[obj], rng_seed=0)
