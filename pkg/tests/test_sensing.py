"""Wedge sensor and observation-assembly behavior."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pposg.config import EnvConfig
from pposg.sim.observation import build_observation
from pposg.sim.sensing import measure, visibility
from pposg.sim.types import (CarParams, CarState, PointMassParams,
                             PointMassState, SensorParams)

WEDGE = SensorParams(fov_angle=2.0 * math.pi / 3.0, range=6.0)
FULL = SensorParams(fov_angle=2.0 * math.pi, range=6.0)


def test_target_inside_wedge():
    # dist ~4.243 <= 6, bearing pi/4 <= pi/3
    assert visibility((0.0, 0.0), 0.0, WEDGE, (3.0, 3.0)) == 1


def test_target_outside_angular_bound():
    # bearing pi/2 > pi/3
    assert visibility((0.0, 0.0), 0.0, WEDGE, (0.0, 5.0)) == -1


def test_colocated_target_visible():
    assert visibility((1.0, 1.0), 0.7, WEDGE, (1.0, 1.0)) == 1


def test_range_boundary_inclusive():
    assert visibility((0.0, 0.0), 0.0, WEDGE, (6.0, 0.0)) == 1
    assert visibility((0.0, 0.0), 0.0, WEDGE, (6.0 + 1e-6, 0.0)) == -1


def test_full_circle_sensor_ignores_bearing():
    assert visibility((0.0, 0.0), 0.0, FULL, (-3.0, 0.0)) == 1


@settings(max_examples=300, deadline=None)
@given(ox=st.floats(-8, 8), oy=st.floats(-8, 8), heading=st.floats(-3.1, 3.1),
       tx=st.floats(-8, 8), ty=st.floats(-8, 8),
       rot=st.floats(-3.1, 3.1), shift_x=st.floats(-5, 5),
       shift_y=st.floats(-5, 5))
def test_visibility_rigid_motion_invariance(ox, oy, heading, tx, ty,
                                            rot, shift_x, shift_y):
    base = visibility((ox, oy), heading, WEDGE, (tx, ty))
    c, s = math.cos(rot), math.sin(rot)
    R = np.array([[c, -s], [s, c]])
    obs2 = R @ np.array([ox, oy]) + (shift_x, shift_y)
    tgt2 = R @ np.array([tx, ty]) + (shift_x, shift_y)
    moved = visibility(tuple(obs2), heading + rot, WEDGE, tuple(tgt2))
    # rigid motions preserve distance and bearing; exempt razor-thin margins
    # where float rounding in the rotation legitimately flips the flag
    dist = math.hypot(tx - ox, ty - oy)
    bearing = abs(math.atan2(ty - oy, tx - ox) - heading)
    bearing = abs((bearing + math.pi) % (2 * math.pi) - math.pi)
    on_edge = (dist < 1e-7
               or abs(dist - WEDGE.range) < 1e-9
               or abs(bearing - WEDGE.fov_angle / 2) < 1e-9)
    if not on_edge:
        assert base == moved


def test_measure_zeroes_when_invisible():
    state = np.array([1.0, 2.0, 0.5, -0.5])
    np.testing.assert_array_equal(measure(-1, state), np.zeros(4))
    np.testing.assert_array_equal(measure(1, state), state)


@pytest.fixture
def env_config():
    return EnvConfig()


def test_observation_zero_state_all_zero_but_flag(env_config):
    own = CarState(0.0, 0.0)
    opp = PointMassState(0.0, 0.0)
    obs = build_observation(own, env_config.pursuer.dynamics_params, opp,
                            env_config.evader.dynamics_params, 1, 0,
                            env_config)
    assert len(obs) == 11
    assert obs[9] == 1.0          # visibility flag
    np.testing.assert_array_equal(np.delete(obs, 9), np.zeros(10))


def test_observation_invisible_zeroes_opponent_block(env_config):
    own = CarState(1.0, 2.0, delta=0.1, v=1.0, psi=0.5)
    opp = PointMassState(3.0, 3.0, vx=1.0, vy=-1.0)
    obs = build_observation(own, env_config.pursuer.dynamics_params, opp,
                            env_config.evader.dynamics_params, -1, 10,
                            env_config)
    np.testing.assert_array_equal(obs[5:9], np.zeros(4))
    assert obs[9] == -1.0
    assert obs[10] == pytest.approx(10 / env_config.timeout)


def test_observation_boundary_position_maps_to_one(env_config):
    hx = env_config.half_extents[0]
    own = CarState(hx, 0.0)
    obs = build_observation(own, env_config.pursuer.dynamics_params, None,
                            env_config.evader.dynamics_params, -1, 0,
                            env_config)
    assert obs[0] == 1.0


def test_observation_overflow_clamped(env_config):
    own = CarState(100.0, 0.0)  # far outside the workspace
    obs = build_observation(own, env_config.pursuer.dynamics_params, None,
                            env_config.evader.dynamics_params, -1, 0,
                            env_config)
    assert np.all(np.abs(obs) <= 1.0)
