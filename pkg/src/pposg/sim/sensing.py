"""Wedge sensor model: visibility flag and the measurement block."""

from __future__ import annotations

import math

import numpy as np

from .types import SensorParams, wrap_angle


def visibility(observer_xy, observer_heading: float, sensor: SensorParams,
               target_xy) -> int:
    """Return +1 if the target is inside the sensor wedge, else -1.

    Both the range and the half-angle boundary are inclusive. Full-circle
    sensors (fov 2*pi) always pass the angular test.
    """
    dx = target_xy[0] - observer_xy[0]
    dy = target_xy[1] - observer_xy[1]
    dist = math.hypot(dx, dy)
    if dist > sensor.range:
        return -1
    if sensor.fov_angle >= 2.0 * math.pi - 1e-12:
        return 1
    if dist == 0.0:
        return 1
    bearing = wrap_angle(math.atan2(dy, dx) - observer_heading)
    return 1 if abs(bearing) <= sensor.fov_angle / 2.0 + 1e-12 else -1


def measure(flag: int, target_state_vector: np.ndarray) -> np.ndarray:
    """Opponent state vector when visible, zeros of the same length otherwise."""
    if flag == 1:
        return np.asarray(target_state_vector, dtype=np.float64).copy()
    return np.zeros(len(target_state_vector))
