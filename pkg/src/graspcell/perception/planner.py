"""Dense 4-DOF grasp-quality evaluation on inpainted depth crops.

Quality of a candidate (u, v, theta) is the product of three terms:

  fit    — marching from the center along +/-axis, both contact edges (depth
           rise > delta_edge relative to the center depth) must be found
           within half the pixel-space opening, and their separation must
           leave the configured margin;
  align  — antipodality of the depth-gradient normals at the two edges
           projected on the axis;
  clear  — the jaws descend insertion_depth below the contact plane, so the
           landing rectangles just outside each edge must contain no depth
           shallower than center depth plus the insertion depth.

The grid planner and the single-candidate entry point run the identical
vectorized code, so a planned map equals pointwise evaluation by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..scene.types import CameraIntrinsics, DepthFrame
from .types import BoundingBox, GraspCandidate, GraspMap


class NoFeasibleGrasp(RuntimeError):
    """Every candidate inside the allowed box has zero quality."""


@dataclass(frozen=True)
class PlannerConfig:
    delta_edge: float = 0.008
    margin: float = 0.05
    stride: int = 4
    angular_bins: int = 16


DEFAULT_PLANNER = PlannerConfig()


def _frame_fx_eff(frame: DepthFrame, cam: CameraIntrinsics) -> float:
    """Pixels per meter at unit depth in this frame's pixel grid."""
    return cam.fx * frame.transform.uniform_scale


def _gradients(depth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gy, gx = np.gradient(depth)
    return gx, gy


def _evaluate_theta(depth: np.ndarray, gx: np.ndarray, gy: np.ndarray,
                    us: np.ndarray, vs: np.ndarray, theta: float,
                    fx_eff: float, max_opening: float, jaw_thickness: float,
                    jaw_width: float, insertion_depth: float,
                    cfg: PlannerConfig) -> np.ndarray:
    """Qualities for all centers at one axis angle."""
    h, w = depth.shape
    n = us.size
    du, dv = float(np.cos(theta)), float(np.sin(theta))
    nu, nv = -dv, du

    z0 = depth[vs, us]
    opening_px = fx_eff * max_opening / z0
    half = opening_px / 2.0

    s_max = int(np.ceil(half.max()))
    steps = np.arange(1, s_max + 1, dtype=np.float64)

    edges: list[np.ndarray] = []
    found: list[np.ndarray] = []
    for sign in (-1.0, +1.0):
        pu = np.rint(us[None, :] + sign * steps[:, None] * du).astype(np.int64)
        pv = np.rint(vs[None, :] + sign * steps[:, None] * dv).astype(np.int64)
        inb = (pu >= 0) & (pu < w) & (pv >= 0) & (pv < h)
        vals = np.where(inb, depth[np.clip(pv, 0, h - 1), np.clip(pu, 0, w - 1)], -np.inf)
        rise = (vals - z0[None, :] > cfg.delta_edge) & inb & (steps[:, None] <= half[None, :])
        found.append(rise.any(axis=0))
        edges.append(rise.argmax(axis=0) + 1.0)  # step index of first crossing

    e_neg, e_pos = edges
    both = found[0] & found[1]
    separation = e_neg + e_pos
    w_fit = both & (separation <= opening_px * (1.0 - cfg.margin))

    q = np.zeros(n)
    live = np.nonzero(w_fit)[0]
    if live.size == 0:
        return q

    # antipodal alignment from depth-gradient normals at the edge pixels
    w_align = np.zeros(live.size)
    normals = []
    for sign, e in ((-1.0, e_neg[live]), (+1.0, e_pos[live])):
        eu = np.rint(us[live] + sign * e * du).astype(np.int64)
        ev = np.rint(vs[live] + sign * e * dv).astype(np.int64)
        interior = (eu >= 1) & (eu < w - 1) & (ev >= 1) & (ev < h - 1)
        gxe = np.where(interior, gx[np.clip(ev, 0, h - 1), np.clip(eu, 0, w - 1)], 0.0)
        gye = np.where(interior, gy[np.clip(ev, 0, h - 1), np.clip(eu, 0, w - 1)], 0.0)
        mag = np.hypot(gxe, gye)
        ok = interior & (mag > 1e-12)
        nx = np.where(ok, gxe / np.where(mag > 0, mag, 1.0), 0.0)
        ny = np.where(ok, gye / np.where(mag > 0, mag, 1.0), 0.0)
        normals.append((nx, ny, ok))
    (nlx, nly, ok_l), (nrx, nry, ok_r) = normals
    dot_l = -(nlx * du + nly * dv)
    dot_r = nrx * du + nry * dv
    w_align = np.maximum(0.0, dot_l) * np.maximum(0.0, dot_r)
    w_align[~(ok_l & ok_r)] = 0.0

    alive = live[w_align > 0.0]
    align_vals = w_align[w_align > 0.0]
    if alive.size == 0:
        return q

    # jaw landing zone collision check; sample counts derive from the frame's
    # nearest depth so the scalar and grid paths agree exactly
    z_min = float(depth.min())
    n_t = max(2, int(np.ceil(fx_eff * jaw_thickness / z_min)) + 1)
    n_s = max(2, int(np.ceil(fx_eff * jaw_width / z_min)) + 1)
    a = np.arange(n_t)[:, None, None]
    b = np.arange(n_s)[None, :, None]
    z0a = z0[alive][None, None, :]
    jt_px = fx_eff * jaw_thickness / z0a
    jw_px = fx_eff * jaw_width / z0a
    t_off = 1.0 + jt_px * a / (n_t - 1)
    s_off = -jw_px / 2.0 + jw_px * b / (n_s - 1)
    clear = np.ones(alive.size, dtype=bool)
    for sign, e in ((-1.0, e_neg[alive]), (+1.0, e_pos[alive])):
        t_abs = e[None, None, :] + t_off
        zu = np.rint(us[alive][None, None, :] + sign * t_abs * du + s_off * nu).astype(np.int64)
        zv = np.rint(vs[alive][None, None, :] + sign * t_abs * dv + s_off * nv).astype(np.int64)
        inb = (zu >= 0) & (zu < w) & (zv >= 0) & (zv < h)
        vals = np.where(inb, depth[np.clip(zv, 0, h - 1), np.clip(zu, 0, w - 1)], np.inf)
        collision = (vals < z0a + insertion_depth).any(axis=(0, 1))
        clear &= ~collision

    q[alive] = align_vals * clear
    return q


def _require_inpainted(frame: DepthFrame) -> None:
    if not frame.valid.all():
        raise ValueError("grasp evaluation requires an inpainted (all-valid) frame")


def grasp_quality(depth: DepthFrame, u: int, v: int, theta: float, g, cam: CameraIntrinsics,
                  cfg: PlannerConfig = DEFAULT_PLANNER) -> float:
    """Quality in [0, 1] of a single candidate; 0 for degenerate geometry."""
    _require_inpainted(depth)
    if not (0 <= u < depth.width and 0 <= v < depth.height):
        return 0.0
    gx, gy = _gradients(depth.data)
    q = _evaluate_theta(depth.data, gx, gy, np.array([int(u)]), np.array([int(v)]),
                        theta, _frame_fx_eff(depth, cam), g.max_opening,
                        g.jaw_thickness, g.jaw_width, g.insertion_depth, cfg)
    return float(np.clip(q[0], 0.0, 1.0))


def plan_grasp(crop: DepthFrame, box: BoundingBox, g, cam: CameraIntrinsics,
               stride: int | None = None, angular_bins: int | None = None,
               cfg: PlannerConfig = DEFAULT_PLANNER) -> GraspMap:
    """Evaluate the full (u, v, theta) grid; best is the in-box argmax.

    Ties break toward the lower linear index of the [row, col, angle] grid.
    Raises NoFeasibleGrasp when every in-box candidate scores zero.
    """
    _require_inpainted(crop)
    stride = int(stride if stride is not None else cfg.stride)
    k_bins = int(angular_bins if angular_bins is not None else cfg.angular_bins)
    if stride < 1 or k_bins < 1:
        raise ValueError("stride and angular_bins must be >= 1")

    us = np.arange(stride // 2, crop.width, stride, dtype=np.int64)
    vs = np.arange(stride // 2, crop.height, stride, dtype=np.int64)
    uu, vv = np.meshgrid(us, vs)
    flat_u = uu.ravel()
    flat_v = vv.ravel()

    gx, gy = _gradients(crop.data)
    fx_eff = _frame_fx_eff(crop, cam)
    q = np.zeros((vs.size, us.size, k_bins))
    for k in range(k_bins):
        theta = np.pi * k / k_bins
        qk = _evaluate_theta(crop.data, gx, gy, flat_u, flat_v, theta, fx_eff,
                             g.max_opening, g.jaw_thickness, g.jaw_width,
                             g.insertion_depth, cfg)
        q[:, :, k] = qk.reshape(vs.size, us.size)
    q = np.clip(q, 0.0, 1.0)

    in_box = (box.contains(u, v) for v in vs for u in us)
    mask = np.fromiter(in_box, dtype=bool, count=us.size * vs.size).reshape(vs.size, us.size)
    masked = np.where(mask[:, :, None], q, -1.0)
    flat_idx = int(np.argmax(masked))
    best_q = float(masked.ravel()[flat_idx])
    if best_q <= 0.0:
        raise NoFeasibleGrasp("no positive-quality grasp inside the box")

    j, i, k = np.unravel_index(flat_idx, masked.shape)
    u_best, v_best = int(us[i]), int(vs[j])
    best = GraspCandidate(u=u_best, v=v_best, theta=float(np.pi * k / k_bins),
                          z=float(crop.data[v_best, u_best]), quality=best_q)
    return GraspMap(stride=stride, angular_bins=k_bins, us=us, vs=vs, q=q, best=best)
