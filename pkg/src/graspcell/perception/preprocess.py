"""Depth-frame preprocessing: ROI crop/scale and box-centered crops.

Nearest-neighbor resampling with the pixel-center convention
source_index = floor((i + 0.5) * src / out); the hole mask is transformed
with the identical index map so a scaled pixel is a hole iff its source is.
Every derived frame records the affine map back to sensor pixels.
"""

from __future__ import annotations

import numpy as np

from ..scene.types import DepthFrame, PixelTransform
from .types import BoundingBox


class BadRoi(ValueError):
    pass


class BadBox(ValueError):
    pass


def _nearest_indices(src: int, out: int) -> np.ndarray:
    idx = ((np.arange(out) + 0.5) * src / out).astype(np.int64)
    return np.minimum(idx, src - 1)


def _resample(frame: DepthFrame, u0: int, v0: int, u1: int, v1: int,
              out_w: int, out_h: int) -> DepthFrame:
    src_w, src_h = u1 - u0, v1 - v0
    cols = u0 + _nearest_indices(src_w, out_w)
    rows = v0 + _nearest_indices(src_h, out_h)
    data = frame.data[np.ix_(rows, cols)]
    valid = frame.valid[np.ix_(rows, cols)]
    window = PixelTransform(offset_u=float(u0), offset_v=float(v0),
                            scale_u=out_w / src_w, scale_v=out_h / src_h)
    return DepthFrame(data=data, valid=valid, intrinsics_ref=frame.intrinsics_ref,
                      transform=frame.transform.compose(window))


def preprocess_depth(raw: DepthFrame, roi: tuple[int, int, int, int],
                     out_dims: tuple[int, int]) -> DepthFrame:
    """Crop to `roi` (u0, v0, u1, v1) then nearest-neighbor scale to out_dims."""
    u0, v0, u1, v1 = (int(x) for x in roi)
    if not (0 <= u0 < u1 <= raw.width and 0 <= v0 < v1 <= raw.height):
        raise BadRoi(f"roi {roi} outside {raw.width}x{raw.height} frame")
    out_w, out_h = (int(x) for x in out_dims)
    if out_w < 1 or out_h < 1:
        raise BadRoi("output dims must be positive")
    return _resample(raw, u0, v0, u1, v1, out_w, out_h)


def crop_to_box(depth: DepthFrame, box: BoundingBox, out_dims: tuple[int, int],
                pad: int = 0) -> DepthFrame:
    """Square crop around `box` expanded by `pad`, scaled to out_dims.

    The source window is the padded box grown to a square (so the scale is
    uniform and grasp geometry is not distorted), shifted to stay inside the
    frame.  out_dims must be square.
    """
    out_w, out_h = (int(x) for x in out_dims)
    if out_w != out_h or out_w < 1:
        raise BadBox("crop output must be square")
    if not (0 <= box.u_min and box.u_max <= depth.width
            and 0 <= box.v_min and box.v_max <= depth.height):
        raise BadBox(f"box {box.as_tuple()} outside {depth.width}x{depth.height} frame")

    w = box.u_max - box.u_min + 2 * pad
    h = box.v_max - box.v_min + 2 * pad
    side = int(np.ceil(max(w, h)))
    side = min(side, depth.width, depth.height)
    cu, cv = box.center
    u0 = int(round(cu - side / 2))
    v0 = int(round(cv - side / 2))
    u0 = max(0, min(u0, depth.width - side))
    v0 = max(0, min(v0, depth.height - side))
    return _resample(depth, u0, v0, u0 + side, v0 + side, out_w, out_h)
