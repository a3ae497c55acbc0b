"""Scene and depth-frame serialization for golden tests and export.

Scenes serialize to canonical JSON (sorted keys, 6-decimal floats) so that
identical inputs produce byte-identical files.  Depth frames export as 16-bit
single-channel PNG in millimeters with 0 marking holes.
"""

from __future__ import annotations

import io as _io

import numpy as np
from PIL import Image

from .. import canonjson
from .types import HOLE_SENTINEL, BinDims, DepthFrame, Scene, SceneObject

SCENE_FLOAT_FMT = "%.6f"


def scene_to_dict(scene: Scene) -> dict:
    return {
        "bin_dims": {
            "length": scene.bin_dims.length,
            "width": scene.bin_dims.width,
            "depth": scene.bin_dims.depth,
        },
        "rng_seed": scene.rng_seed,
        "objects": [
            {
                "id": o.id,
                "class_label": o.class_label,
                "pose": [float(o.pose[0]), float(o.pose[1]), float(o.pose[2])],
                "cell_size": float(o.cell_size),
                "graspable_width_mm": float(o.graspable_width_mm),
                "footprint_shape": [int(o.footprint.shape[0]), int(o.footprint.shape[1])],
                "footprint": [float(h) for h in o.footprint.ravel()],
            }
            for o in scene.objects
        ],
    }


def scene_to_canonical_json(scene: Scene) -> str:
    return canonjson.dumps(scene_to_dict(scene), float_fmt=SCENE_FLOAT_FMT)


def scene_from_json(text: str | bytes) -> Scene:
    d = canonjson.loads(text)
    objects = []
    for od in d["objects"]:
        shape = tuple(od["footprint_shape"])
        fp = np.asarray(od["footprint"], dtype=np.float64).reshape(shape)
        objects.append(SceneObject(
            id=int(od["id"]),
            class_label=od["class_label"],
            pose=tuple(od["pose"]),
            footprint=fp,
            cell_size=float(od["cell_size"]),
            graspable_width_mm=float(od["graspable_width_mm"]),
        ))
    bd = d["bin_dims"]
    return Scene(
        bin_dims=BinDims(length=bd["length"], width=bd["width"], depth=bd["depth"]),
        objects=objects,
        rng_seed=int(d["rng_seed"]),
    )


def depth_frame_to_png_bytes(frame: DepthFrame) -> bytes:
    """16-bit grayscale PNG, millimeter units, 0 = hole."""
    mm = np.zeros(frame.data.shape, dtype=np.uint16)
    valid = frame.valid
    mm[valid] = np.clip(np.round(frame.data[valid] * 1000.0), 1, 65535).astype(np.uint16)
    img = Image.fromarray(mm)
    buf = _io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def depth_frame_from_png_bytes(data: bytes) -> DepthFrame:
    img = Image.open(_io.BytesIO(data))
    mm = np.asarray(img, dtype=np.uint16)
    valid = mm > 0
    depth = np.full(mm.shape, HOLE_SENTINEL, dtype=np.float64)
    depth[valid] = mm[valid] / 1000.0
    return DepthFrame(data=depth, valid=valid)
