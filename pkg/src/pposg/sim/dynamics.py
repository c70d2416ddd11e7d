"""Explicit-Euler integration of the car and point-mass models.

State variables saturate at their limits: when a variable sits at a limit
and the input pushes further outward, its derivative is zeroed (no windup).
Positions always integrate the pre-update velocities.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .types import (Action, CarParams, CarState, ModelIntegrityError,
                    PointMassParams, PointMassState, wrap_angle)


def _check_finite(state_vec: np.ndarray, action: Action) -> None:
    if not (np.all(np.isfinite(state_vec)) and math.isfinite(action.u1)
            and math.isfinite(action.u2)):
        raise ModelIntegrityError("non-finite state or action")


def step_car(state: CarState, action: Action, params: CarParams, dt: float) -> CarState:
    """One Euler step of the kinematic bicycle model."""
    _check_finite(state.as_vector(), action)
    action = action.clamped()

    ddelta = action.u1 * params.ddelta_max
    if (state.delta >= params.delta_max and ddelta > 0) or \
       (state.delta <= -params.delta_max and ddelta < 0):
        ddelta = 0.0
    acc = action.u2 * params.a_max
    if (state.v >= params.v_max and acc > 0) or \
       (state.v <= params.v_min and acc < 0):
        acc = 0.0

    sx = state.sx + dt * state.v * math.cos(state.psi)
    sy = state.sy + dt * state.v * math.sin(state.psi)
    psi = wrap_angle(state.psi + dt * state.v / params.wheelbase * math.tan(state.delta))
    delta = float(np.clip(state.delta + dt * ddelta, -params.delta_max, params.delta_max))
    v = float(np.clip(state.v + dt * acc, params.v_min, params.v_max))
    return CarState(sx=sx, sy=sy, delta=delta, v=v, psi=psi)


def step_pointmass(state: PointMassState, action: Action,
                   params: PointMassParams, dt: float) -> PointMassState:
    """One Euler step of the double-integrator point mass."""
    _check_finite(state.as_vector(), action)
    action = action.clamped()

    ax = action.u1 * params.a_max
    ay = action.u2 * params.a_max
    if (state.vx >= params.v_max and ax > 0) or (state.vx <= -params.v_max and ax < 0):
        ax = 0.0
    if (state.vy >= params.v_max and ay > 0) or (state.vy <= -params.v_max and ay < 0):
        ay = 0.0

    sx = state.sx + dt * state.vx
    sy = state.sy + dt * state.vy
    vx = float(np.clip(state.vx + dt * ax, -params.v_max, params.v_max))
    vy = float(np.clip(state.vy + dt * ay, -params.v_max, params.v_max))
    return PointMassState(sx=sx, sy=sy, vx=vx, vy=vy)


def step_agent(state, action, params, dt: float):
    if isinstance(state, CarState):
        return step_car(state, action, params, dt)
    return step_pointmass(state, action, params, dt)
