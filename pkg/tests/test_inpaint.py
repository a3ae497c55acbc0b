from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graspcell.perception import AllHoles, inpaint
from graspcell.scene.types import DepthFrame

from .oracles import diffusion_inpaint


def _random_frame(rng: np.random.Generator, h: int = 24, w: int = 32,
                  hole_frac: float = 0.25) -> DepthFrame:
    data = 0.4 + 0.3 * rng.random((h, w))
    valid = rng.random((h, w)) >= hole_frac
    if not valid.any():
        valid[0, 0] = True
    data = np.where(valid, data, 0.0)
    return DepthFrame(data=data, valid=valid)


def test_no_holes_is_identity():
    rng = np.random.default_rng(0)
    f = _random_frame(rng, hole_frac=0.0)
    out = inpaint(f)
    assert np.array_equal(out.data, f.data)
    assert out.valid.all()


def test_constant_frame_fills_to_constant():
    rng = np.random.default_rng(1)
    valid = rng.random((20, 20)) >= 0.4
    valid[0, 0] = True
    data = np.where(valid, 0.55, 0.0)
    out = inpaint(DepthFrame(data=data, valid=valid))
    assert out.valid.all()
    assert np.allclose(out.data, 0.55)


def test_step_edge_blob_bounded_by_surface_values():
    # hole blob spanning a step between 0.50 and 0.46 surfaces
    data = np.full((30, 40), 0.50)
    data[:, 20:] = 0.46
    valid = np.ones((30, 40), bool)
    yy, xx = np.mgrid[0:30, 0:40]
    blob = (xx - 20) ** 2 + (yy - 15) ** 2 <= 36
    valid[blob] = False
    f = DepthFrame(data=np.where(valid, data, 0.0), valid=valid)
    out = inpaint(f)
    assert out.valid.all()
    assert out.data[blob].min() >= 0.46 - 1e-12
    assert out.data[blob].max() <= 0.50 + 1e-12


def test_matches_reference_diffusion_bitwise():
    rng = np.random.default_rng(7)
    f = _random_frame(rng, h=16, w=20, hole_frac=0.3)
    out = inpaint(f)
    ref = diffusion_inpaint(f.data, f.valid)
    assert np.array_equal(out.data, ref)


def test_all_holes_raises():
    f = DepthFrame(data=np.zeros((8, 8)), valid=np.zeros((8, 8), bool))
    with pytest.raises(AllHoles):
        inpaint(f)


def test_properties_on_200_randomized_frames():
    rng = np.random.default_rng(42)
    for _ in range(200):
        f = _random_frame(rng, h=20, w=24, hole_frac=float(rng.uniform(0.05, 0.5)))
        out = inpaint(f)
        # all-valid output
        assert out.valid.all()
        # valid pixels bit-identical
        assert np.array_equal(out.data[f.valid], f.data[f.valid])
        # min-max principle
        lo, hi = f.data[f.valid].min(), f.data[f.valid].max()
        assert out.data.min() >= lo - 1e-12
        assert out.data.max() <= hi + 1e-12
        # idempotence
        again = inpaint(out)
        assert np.array_equal(again.data, out.data)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), hole_frac=st.floats(0.05, 0.6))
def test_hypothesis_idempotent_and_bounded(seed: int, hole_frac: float):
    rng = np.random.default_rng(seed)
    f = _random_frame(rng, h=12, w=14, hole_frac=hole_frac)
    out = inpaint(f)
    assert out.valid.all()
    assert np.array_equal(inpaint(out).data, out.data)
    lo, hi = f.data[f.valid].min(), f.data[f.valid].max()
    assert out.data.min() >= lo - 1e-12 and out.data.max() <= hi + 1e-12
