from __future__ import annotations

import numpy as np
import pytest

from graspcell.controller import (
    BadDepth,
    Extrinsics,
    MotionProfile,
    deproject,
    motion_time,
    project,
    to_robot_frame,
)


def test_principal_ray(cam):
    assert deproject(cam.cx, cam.cy, 0.5, cam) == (0.0, 0.0, 0.5)


def test_one_focal_length_off_axis(cam):
    x, y, z = deproject(cam.cx + cam.fx, cam.cy, 0.5, cam)
    assert (x, y, z) == pytest.approx((0.5, 0.0, 0.5))


def test_deproject_rejects_nonpositive_depth(cam):
    with pytest.raises(BadDepth):
        deproject(10, 10, 0.0, cam)


def test_round_trip_recovers_pixel(cam):
    rng = np.random.default_rng(5)
    for _ in range(500):
        u = float(rng.uniform(0, cam.width))
        v = float(rng.uniform(0, cam.height))
        z = float(rng.uniform(0.2, 2.0))
        p = deproject(u, v, z, cam)
        u2, v2 = project(p, cam)
        assert abs(u2 - u) < 1e-6 and abs(v2 - v) < 1e-6


def test_identity_extrinsics_passthrough():
    e = Extrinsics.identity()
    x, y, z, yaw = to_robot_frame((0.1, 0.2, 0.3), e, yaw_cam=0.4)
    assert (x, y, z) == pytest.approx((0.1, 0.2, 0.3))
    assert yaw == pytest.approx(0.4)


def test_pure_translation():
    e = Extrinsics.from_rotation_translation(np.eye(3), np.array([1.0, 2.0, 3.0]))
    x, y, z, _ = to_robot_frame((0.1, 0.2, 0.3), e)
    assert (x, y, z) == pytest.approx((1.1, 2.2, 3.3))


def test_composition_matches_two_step_application():
    rng = np.random.default_rng(11)
    for _ in range(50):
        angles = rng.uniform(0, 2 * np.pi, 2)

        def rot_z(a):
            return np.array([[np.cos(a), -np.sin(a), 0],
                             [np.sin(a), np.cos(a), 0],
                             [0, 0, 1.0]])

        e1 = Extrinsics.from_rotation_translation(rot_z(angles[0]), rng.uniform(-1, 1, 3))
        e2 = Extrinsics.from_rotation_translation(rot_z(angles[1]), rng.uniform(-1, 1, 3))
        p = tuple(rng.uniform(-1, 1, 3))
        two_step = to_robot_frame(to_robot_frame(p, e2)[:3], e1)
        composed = to_robot_frame(p, e1.compose(e2))
        assert np.allclose(two_step[:3], composed[:3], atol=1e-12)


def test_rigidity_preserves_distances():
    e = Extrinsics.overhead_camera((0.4, 0.0, 0.7))
    rng = np.random.default_rng(3)
    for _ in range(100):
        a = rng.uniform(-0.5, 0.5, 3)
        b = rng.uniform(-0.5, 0.5, 3)
        pa = np.array(to_robot_frame(tuple(a), e)[:3])
        pb = np.array(to_robot_frame(tuple(b), e)[:3])
        assert abs(np.linalg.norm(pa - pb) - np.linalg.norm(a - b)) < 1e-9


def test_overhead_camera_geometry():
    e = Extrinsics.overhead_camera((0.4, 0.0, 0.7))
    # a point 0.7 m straight below the camera lands at the bin center on the floor
    x, y, z, _ = to_robot_frame((0.0, 0.0, 0.7), e)
    assert (x, y, z) == pytest.approx((0.4, 0.0, 0.0))


def test_non_orthonormal_rotation_rejected():
    m = np.eye(4)
    m[0, 0] = 1.5
    with pytest.raises(ValueError):
        Extrinsics(matrix=m)


def test_motion_time_zero_distance():
    prof = MotionProfile()
    assert motion_time((0, 0, 0), (0, 0, 0), prof) == 0.0


def test_motion_time_cruise_branch():
    prof = MotionProfile(max_speed=1.0, accel=2.0)
    # d = 1 m >= v^2/a = 0.5: t = d/v + v/a = 1.5 s
    assert motion_time((0, 0, 0), (1.0, 0, 0), prof) == pytest.approx(1.5)


def test_motion_time_triangular_branch():
    prof = MotionProfile(max_speed=1.0, accel=2.0)
    # d = 0.1 < 0.5: t = 2 sqrt(d/a) = 2 sqrt(0.05)
    assert motion_time((0, 0, 0), (0.1, 0, 0), prof) == pytest.approx(2 * np.sqrt(0.05))


def test_motion_time_uses_euclidean_distance():
    prof = MotionProfile(max_speed=1.0, accel=2.0)
    t1 = motion_time((0, 0, 0), (3.0, 4.0, 0.0), prof)
    t2 = motion_time((0, 0, 0), (5.0, 0.0, 0.0), prof)
    assert t1 == pytest.approx(t2)
