from __future__ import annotations

import numpy as np

from graspcell.scene import (
    NoiseParams,
    depth_frame_from_png_bytes,
    depth_frame_to_png_bytes,
    render_depth,
    scene_from_json,
    scene_to_canonical_json,
)

from .conftest import make_block_scene


def test_scene_json_round_trip(catalog):
    from graspcell.scene import Packing, generate_bin

    scene = generate_bin(seed=4, catalog=catalog, count=3, packing=Packing.LIGHT)
    text = scene_to_canonical_json(scene)
    back = scene_from_json(text)
    assert len(back.objects) == len(scene.objects)
    for a, b in zip(scene.objects, back.objects):
        assert a.id == b.id and a.class_label == b.class_label
        assert np.allclose(a.pose, b.pose, atol=1e-6)
        assert a.footprint.shape == b.footprint.shape
    # canonical form is a fixed point of serialize(parse(.))
    assert scene_to_canonical_json(back) == text


def test_canonical_json_is_sorted_and_fixed_precision(catalog):
    from graspcell.scene import Packing, generate_bin

    scene = generate_bin(seed=4, catalog=catalog, count=2, packing=Packing.LIGHT)
    text = scene_to_canonical_json(scene)
    assert text.index('"bin_dims"') < text.index('"objects"') < text.index('"rng_seed"')
    assert "0.450000" in text  # 6-decimal float policy


def test_depth_png_round_trip(cam):
    scene = make_block_scene()
    frame = render_depth(scene, cam, noise=NoiseParams(), seed=1)
    png = depth_frame_to_png_bytes(frame)
    assert png[:8] == b"\x89PNG\r\n\x1a\n"
    back = depth_frame_from_png_bytes(png)
    assert np.array_equal(back.valid, frame.valid)
    # depths survive to millimeter quantization
    diff = np.abs(back.data[frame.valid] - frame.data[frame.valid])
    assert diff.max() <= 0.0005 + 1e-9


def test_png_holes_are_zero(cam):
    scene = make_block_scene()
    frame = render_depth(scene, cam, noise=NoiseParams(hole_rate=0.1), seed=2)
    assert not frame.valid.all()
    png = depth_frame_to_png_bytes(frame)
    back = depth_frame_from_png_bytes(png)
    assert np.array_equal(back.valid, frame.valid)
