"""Consumer-grade depth sensor noise: correlated bulge field and hole blobs.

The correlated field is i.i.d. Gaussian on a coarse grid, bilinearly
upsampled — cheap, deterministic, and spatially smooth at the pitch scale.
Holes are dilated seed blobs whose placement is biased toward depth
discontinuities.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .types import NoiseParams

# Gradient magnitude (m per pixel) above which a pixel counts as a depth edge.
EDGE_GRAD_THRESHOLD = 0.004


def _bilinear_upsample(coarse: np.ndarray, w: int, h: int, pitch: int) -> np.ndarray:
    """Resample a coarse node grid (spacing `pitch` px) onto a w x h image."""
    gh, gw = coarse.shape
    u = np.arange(w) / pitch
    v = np.arange(h) / pitch
    u0 = np.clip(np.floor(u).astype(np.int64), 0, gw - 2) if gw > 1 else np.zeros(w, np.int64)
    v0 = np.clip(np.floor(v).astype(np.int64), 0, gh - 2) if gh > 1 else np.zeros(h, np.int64)
    fu = np.clip(u - u0, 0.0, 1.0) if gw > 1 else np.zeros(w)
    fv = np.clip(v - v0, 0.0, 1.0) if gh > 1 else np.zeros(h)
    u1 = np.minimum(u0 + 1, gw - 1)
    v1 = np.minimum(v0 + 1, gh - 1)

    c00 = coarse[np.ix_(v0, u0)]
    c01 = coarse[np.ix_(v0, u1)]
    c10 = coarse[np.ix_(v1, u0)]
    c11 = coarse[np.ix_(v1, u1)]
    fu2 = fu[None, :]
    fv2 = fv[:, None]
    top = c00 * (1 - fu2) + c01 * fu2
    bot = c10 * (1 - fu2) + c11 * fu2
    return top * (1 - fv2) + bot * fv2


def sample_gp_noise(seed: int, w: int, h: int, params: NoiseParams) -> np.ndarray:
    """Zero-mean spatially correlated noise field, deterministic per seed."""
    if params.grid_pitch < 1:
        raise ValueError("grid_pitch must be >= 1")
    if params.sigma_base == 0.0:
        return np.zeros((h, w))
    rng = np.random.default_rng([seed, 0x6F15E])
    gw = int(np.ceil((w - 1) / params.grid_pitch)) + 1
    gh = int(np.ceil((h - 1) / params.grid_pitch)) + 1
    coarse = rng.normal(0.0, params.sigma_base, size=(gh, gw))
    if params.grid_pitch == 1:
        return coarse[:h, :w]
    return _bilinear_upsample(coarse, w, h, params.grid_pitch)


def _edge_mask(depth: np.ndarray) -> np.ndarray:
    gy, gx = np.gradient(depth)
    mag = np.hypot(gx, gy)
    edges = mag > EDGE_GRAD_THRESHOLD
    return ndimage.binary_dilation(edges, iterations=2) if edges.any() else edges


def sample_hole_mask(seed: int, clean_depth: np.ndarray, params: NoiseParams) -> np.ndarray:
    """Hole mask targeting `hole_rate` coverage, biased toward depth edges.

    Seeds are drawn without replacement from an edge-boosted weight map and
    dilated into blobs; batches are added until the measured hole fraction
    reaches the target, so the realized rate tracks hole_rate from below.
    """
    h, w = clean_depth.shape
    if params.hole_rate <= 0.0:
        return np.zeros((h, w), dtype=bool)

    rng = np.random.default_rng([seed, 0xB10B5])
    weights = np.ones((h, w))
    if params.edge_hole_boost > 0:
        weights[_edge_mask(clean_depth)] += params.edge_hole_boost
    cdf = np.cumsum(weights.ravel())
    cdf /= cdf[-1]

    target_px = int(round(params.hole_rate * h * w))
    r = params.hole_blob_radius
    if r > 0:
        yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
        disk = (xx * xx + yy * yy) <= r * r
        blob_area = int(disk.sum())
    else:
        disk = None
        blob_area = 1

    mask = np.zeros((h, w), dtype=bool)
    # first batch sized for the no-overlap case, then top up; seed positions
    # come from inverse-CDF draws (duplicates merely waste a seed)
    remaining = target_px
    for _ in range(8):
        if remaining <= 0:
            break
        n_seeds = max(1, int(np.ceil(remaining / blob_area)))
        n_seeds = min(n_seeds, h * w)
        idx = np.searchsorted(cdf, rng.random(n_seeds), side="right")
        idx = np.minimum(idx, h * w - 1)
        seeds = np.zeros((h, w), dtype=bool)
        seeds.ravel()[idx] = True
        mask |= ndimage.binary_dilation(seeds, structure=disk) if disk is not None else seeds
        remaining = target_px - int(mask.sum())
    return mask
