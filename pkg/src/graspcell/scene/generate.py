"""Reproducible synthetic bin generation."""

from __future__ import annotations

import enum

import numpy as np
from scipy import ndimage

from .catalog import ObjectTemplate
from .grasp_truth import find_feasible_grasp
from .raster import GridGeometry, rasterize_object, rasterize_scene
from .types import BinDims, GripperParams, Scene, SceneObject

# Minimum footprint-to-footprint gap enforced by Light packing; sized so the
# jaw landing zones (thickness + clearance) of a sane grasp stay clear.
LIGHT_MIN_GAP_M = 0.030

MAX_OBJECT_ATTEMPTS = 250
MAX_SCENE_ATTEMPTS = 25


class Packing(enum.Enum):
    LIGHT = "Light"
    DENSE = "Dense"


class PlacementFailure(RuntimeError):
    """Could not place the requested object count within the attempt budget."""




def generate_bin(seed: int, catalog: list[ObjectTemplate], count: int,
                 packing: Packing = Packing.LIGHT,
                 bin_dims: BinDims | None = None,
                 gripper: GripperParams | None = None) -> Scene:
    """Deterministically place `count` catalog objects in a bin.

    Light packing rejection-samples poses with a spacing margin and accepts a
    scene only once every object has at least one feasible ground-truth grasp.
    Dense packing allows arbitrary overlap (later objects rest on earlier).
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if not catalog:
        raise ValueError("catalog must not be empty")
    bin_dims = bin_dims or BinDims()
    gripper = gripper or GripperParams()
    rng = np.random.default_rng([seed, 0xB14])

    if count == 0:
        return Scene(bin_dims=bin_dims, objects=[], rng_seed=seed)

    geom = GridGeometry.for_bin(bin_dims.length, bin_dims.width)
    gap_cells = max(1, int(round(LIGHT_MIN_GAP_M / geom.cell)))
    # square dilation (separable, fast); Chebyshev gap >= the Euclidean gap
    dilate_size = 2 * gap_cells + 1

    for _ in range(MAX_SCENE_ATTEMPTS):
        objects: list[SceneObject] = []
        blocked = np.zeros((geom.ny, geom.nx), dtype=bool)
        ok = True

        for obj_id in range(1, count + 1):
            template = catalog[int(rng.integers(len(catalog)))]
            ext = _template_extent(template)
            placed = False
            for _ in range(MAX_OBJECT_ATTEMPTS):
                yaw = float(rng.uniform(0.0, 2 * np.pi))
                c, s = abs(np.cos(yaw)), abs(np.sin(yaw))
                hx = (c * ext[0] + s * ext[1]) / 2  # rotated AABB half-extents
                hy = (s * ext[0] + c * ext[1]) / 2
                if bin_dims.length <= 2 * hx or bin_dims.width <= 2 * hy:
                    continue
                x = float(rng.uniform(hx, bin_dims.length - hx))
                y = float(rng.uniform(hy, bin_dims.width - hy))
                if packing is Packing.LIGHT:
                    # cheap reject before rasterizing: blocked at the center?
                    ci, cj, inside = geom.cell_index(np.array([x]), np.array([y]))
                    if inside[0] and blocked[cj[0], ci[0]]:
                        continue
                candidate = SceneObject(
                    id=obj_id,
                    class_label=template.class_label,
                    pose=(x, y, yaw),
                    footprint=template.footprint,
                    cell_size=template.cell_size,
                    graspable_width_mm=template.graspable_width_mm,
                )
                occ, _ = rasterize_object(candidate, geom)
                if packing is Packing.LIGHT and (occ & blocked).any():
                    continue
                objects.append(candidate)
                if packing is Packing.LIGHT:
                    blocked |= ndimage.maximum_filter(occ.astype(np.uint8), size=dilate_size) > 0
                placed = True
                break
            if not placed:
                ok = False
                break

        if not ok:
            continue

        scene = Scene(bin_dims=bin_dims, objects=objects, rng_seed=seed)
        if packing is Packing.DENSE:
            return scene
        raster = rasterize_scene(scene)
        if all(find_feasible_grasp(scene, o.id, gripper, raster=raster) is not None
               for o in objects):
            return scene

    raise PlacementFailure(
        f"could not place {count} objects with {packing.value} packing in {MAX_SCENE_ATTEMPTS} scene attempts")


def _template_extent(template: ObjectTemplate) -> tuple[float, float]:
    h, w = template.footprint.shape
    return (w * template.cell_size, h * template.cell_size)
