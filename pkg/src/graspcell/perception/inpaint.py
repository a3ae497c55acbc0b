"""Hole filling by iterative boundary diffusion.

Each pass, every hole pixel with at least one valid 8-neighbor takes the mean
of its valid neighbors and becomes valid; passes repeat until no hole remains.
Jacobi updates (all reads from the previous pass) keep the result independent
of traversal order, and every filled value is a convex combination of valid
inputs, so the output range never escapes [min, max] of the valid data.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..scene.types import DepthFrame

# fixed neighbor order so vectorized sums match a literal per-pixel loop
_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


class AllHoles(ValueError):
    """Frame has no valid pixel to diffuse from."""


def _diffuse_region(data: np.ndarray, valid: np.ndarray, region: np.ndarray) -> None:
    """Fill the holes marked by `region` in place via Jacobi passes.

    Pixels of other hole regions may lie inside this window; they are left
    untouched (no 8-neighbor of this region belongs to another region, so
    skipping them matches a whole-frame simultaneous sweep exactly).
    """
    h, w = data.shape
    while (region & ~valid).any():
        vd = np.zeros((h + 2, w + 2))
        vm = np.zeros((h + 2, w + 2), dtype=bool)
        vd[1:-1, 1:-1] = np.where(valid, data, 0.0)
        vm[1:-1, 1:-1] = valid

        sums = np.zeros((h, w))
        counts = np.zeros((h, w), dtype=np.int64)
        for dj, di in _NEIGHBORS:
            sums += vd[1 + dj:h + 1 + dj, 1 + di:w + 1 + di]
            counts += vm[1 + dj:h + 1 + dj, 1 + di:w + 1 + di]

        fill = region & (~valid) & (counts > 0)
        if not fill.any():
            raise AllHoles("diffusion cannot reach remaining holes")
        data[fill] = sums[fill] / counts[fill]
        valid[fill] = True


def inpaint(depth: DepthFrame) -> DepthFrame:
    """Return an all-valid frame; valid input pixels pass through unchanged."""
    if not depth.valid.any():
        raise AllHoles("frame has no valid pixel")
    if depth.valid.all():
        return depth.copy()

    data = depth.data.copy()
    valid = depth.valid.copy()

    # holes only read their own boundary, so each connected hole region can be
    # diffused independently on a local window (8-connectivity everywhere)
    labels, _ = ndimage.label(~valid, structure=np.ones((3, 3), dtype=int))
    for idx, region in enumerate(ndimage.find_objects(labels), start=1):
        if region is None:
            continue
        j0 = max(0, region[0].start - 1)
        j1 = min(data.shape[0], region[0].stop + 1)
        i0 = max(0, region[1].start - 1)
        i1 = min(data.shape[1], region[1].stop + 1)
        _diffuse_region(data[j0:j1, i0:i1], valid[j0:j1, i0:i1],
                        labels[j0:j1, i0:i1] == idx)

    return DepthFrame(data=data, valid=valid, intrinsics_ref=depth.intrinsics_ref,
                      transform=depth.transform)
