"""Point-to-point motion timing with a trapezoidal velocity profile."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MotionProfile:
    max_speed: float = 0.13  # m/s
    accel: float = 0.5  # m/s^2
    grip_close_s: float = 0.4
    grip_open_s: float = 0.3
    settle_s: float = 0.3

    def __post_init__(self) -> None:
        if min(self.max_speed, self.accel, self.grip_close_s, self.grip_open_s,
               self.settle_s) <= 0:
            raise ValueError("motion profile values must be positive")


def motion_time(p_from: tuple[float, float, float], p_to: tuple[float, float, float],
                prof: MotionProfile) -> float:
    """Travel time over the Euclidean distance: trapezoidal when the cruise
    speed is reached (d >= v^2/a), triangular otherwise."""
    d = float(np.linalg.norm(np.asarray(p_to, dtype=float) - np.asarray(p_from, dtype=float)))
    if d == 0.0:
        return 0.0
    v, a = prof.max_speed, prof.accel
    if d >= v * v / a:
        return d / v + v / a
    return 2.0 * float(np.sqrt(d / a))
