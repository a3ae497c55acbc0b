"""Pixel -> camera -> robot frame conversions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..scene.types import CameraIntrinsics

ORTHONORMAL_TOL = 1e-9


class BadDepth(ValueError):
    pass


@dataclass(frozen=True)
class Extrinsics:
    """Rigid camera-to-robot transform: p_robot = R @ p_cam + t."""

    matrix: np.ndarray  # 4x4

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (4, 4):
            raise ValueError("extrinsics must be a 4x4 matrix")
        r = m[:3, :3]
        if not np.allclose(r.T @ r, np.eye(3), atol=ORTHONORMAL_TOL):
            raise ValueError("rotation block must be orthonormal")
        if np.linalg.det(r) < 0:
            raise ValueError("rotation must be proper (det +1)")
        if not np.allclose(m[3], [0.0, 0.0, 0.0, 1.0]):
            raise ValueError("bottom row must be [0 0 0 1]")
        object.__setattr__(self, "matrix", m)

    @property
    def rotation(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.matrix[:3, 3]

    @classmethod
    def identity(cls) -> "Extrinsics":
        return cls(matrix=np.eye(4))

    @classmethod
    def from_rotation_translation(cls, r: np.ndarray, t: np.ndarray) -> "Extrinsics":
        m = np.eye(4)
        m[:3, :3] = r
        m[:3, 3] = t
        return cls(matrix=m)

    @classmethod
    def overhead_camera(cls, camera_xyz_robot: tuple[float, float, float]) -> "Extrinsics":
        """Camera looking straight down: image x along robot +x, image y along
        robot -y, optical axis along robot -z."""
        r = np.array([[1.0, 0.0, 0.0],
                      [0.0, -1.0, 0.0],
                      [0.0, 0.0, -1.0]])
        return cls.from_rotation_translation(r, np.asarray(camera_xyz_robot, dtype=float))

    def compose(self, other: "Extrinsics") -> "Extrinsics":
        return Extrinsics(matrix=self.matrix @ other.matrix)

    def to_dict(self) -> dict:
        return {"matrix": [[float(x) for x in row] for row in self.matrix]}

    @classmethod
    def from_dict(cls, d: dict) -> "Extrinsics":
        return cls(matrix=np.asarray(d["matrix"], dtype=float))


def deproject(u: float, v: float, z: float, cam: CameraIntrinsics,
              ) -> tuple[float, float, float]:
    """Pinhole back-projection of pixel (u, v) at depth z to the camera frame."""
    if z <= 0:
        raise BadDepth(f"depth must be positive, got {z}")
    x = (u - cam.cx) * z / cam.fx
    y = (v - cam.cy) * z / cam.fy
    return (x, y, z)


def project(p_cam: tuple[float, float, float], cam: CameraIntrinsics,
            ) -> tuple[float, float]:
    x, y, z = p_cam
    if z <= 0:
        raise BadDepth(f"depth must be positive, got {z}")
    return (cam.fx * x / z + cam.cx, cam.fy * y / z + cam.cy)


def to_robot_frame(p_cam: tuple[float, float, float], e: Extrinsics,
                   yaw_cam: float = 0.0) -> tuple[float, float, float, float]:
    """Map a camera-frame point and planar grasp angle into the robot frame.

    The yaw is transported by the rotation's action on the in-plane axis
    direction (cos, sin, 0).
    """
    p = e.rotation @ np.asarray(p_cam, dtype=float) + e.translation
    d_cam = np.array([np.cos(yaw_cam), np.sin(yaw_cam), 0.0])
    d_rob = e.rotation @ d_cam
    yaw_rob = float(np.arctan2(d_rob[1], d_rob[0]))
    return (float(p[0]), float(p[1]), float(p[2]), yaw_rob)
