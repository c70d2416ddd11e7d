"""Agent state/parameter types for the pursuit-evasion world."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


class ModelIntegrityError(Exception):
    """Raised when a dynamics step receives non-finite state or input."""


def wrap_angle(a: float) -> float:
    """Wrap to [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class CarParams:
    lf: float = 0.15
    lr: float = 0.15
    delta_max: float = 0.34
    ddelta_max: float = 3.2
    v_min: float = -1.0
    v_max: float = 2.5
    a_max: float = 2.0

    def __post_init__(self):
        if self.lf + self.lr <= 0:
            raise ValueError("wheelbase must be positive")
        if not self.v_min < self.v_max:
            raise ValueError("v_min must be below v_max")

    @property
    def wheelbase(self) -> float:
        return self.lf + self.lr


@dataclass(frozen=True)
class PointMassParams:
    v_max: float = 1.5
    a_max: float = 9.81


@dataclass(frozen=True)
class SensorParams:
    fov_angle: float
    range: float

    def __post_init__(self):
        if not 0.0 < self.fov_angle <= 2.0 * math.pi + 1e-12:
            raise ValueError("fov_angle must be in (0, 2*pi]")
        if self.range <= 0:
            raise ValueError("range must be positive")


@dataclass(frozen=True)
class Action:
    u1: float
    u2: float

    def clamped(self) -> "Action":
        return Action(min(max(self.u1, -1.0), 1.0), min(max(self.u2, -1.0), 1.0))

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2], dtype=np.float64)


@dataclass(frozen=True)
class CarState:
    sx: float
    sy: float
    delta: float = 0.0
    v: float = 0.0
    psi: float = 0.0

    def position(self) -> np.ndarray:
        return np.array([self.sx, self.sy])

    def heading(self) -> float:
        return self.psi

    def velocity_xy(self) -> np.ndarray:
        return np.array([self.v * math.cos(self.psi), self.v * math.sin(self.psi)])

    def as_vector(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.delta, self.v, self.psi])

    def with_position(self, sx: float, sy: float) -> "CarState":
        return replace(self, sx=sx, sy=sy)


@dataclass(frozen=True)
class PointMassState:
    sx: float
    sy: float
    vx: float = 0.0
    vy: float = 0.0

    def position(self) -> np.ndarray:
        return np.array([self.sx, self.sy])

    def heading(self) -> float:
        return 0.0

    def velocity_xy(self) -> np.ndarray:
        return np.array([self.vx, self.vy])

    def as_vector(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.vx, self.vy])

    def with_position(self, sx: float, sy: float) -> "PointMassState":
        return replace(self, sx=sx, sy=sy)


AgentState = CarState | PointMassState


@dataclass
class JointState:
    pursuer: AgentState
    evader: AgentState
    t: int = 0

    def distance(self) -> float:
        return float(np.linalg.norm(self.pursuer.position() - self.evader.position()))
