"""Per-agent observation vectors.

Layout: [own state block | opponent measurement block | visibility flag |
t / timeout]. Positions are normalized by the workspace half-extents,
angles by pi, velocities and steering by their limits. Car-vs-car games
pad the vector to a fixed width of 12.
"""

from __future__ import annotations

import logging

import numpy as np

from .types import CarParams, CarState, PointMassParams, PointMassState

log = logging.getLogger(__name__)


def _normalize_state(state, params, config) -> np.ndarray:
    cx, cy = config.center
    hx, hy = config.half_extents
    if isinstance(state, CarState):
        assert isinstance(params, CarParams)
        v_norm = max(abs(params.v_min), abs(params.v_max))
        return np.array([
            (state.sx - cx) / hx,
            (state.sy - cy) / hy,
            state.delta / params.delta_max,
            state.v / v_norm,
            state.psi / np.pi,
        ])
    assert isinstance(params, PointMassParams)
    return np.array([
        (state.sx - cx) / hx,
        (state.sy - cy) / hy,
        state.vx / params.v_max,
        state.vy / params.v_max,
    ])


def build_observation(own_state, own_params, measurement_state, opp_params,
                      flag: int, t: int, config) -> np.ndarray:
    """Assemble the normalized observation vector for one agent.

    ``measurement_state`` is the opponent's state object when visible, or
    None when the measurement block is zeroed. Entries outside [-1, 1]
    are clamped and logged.
    """
    own = _normalize_state(own_state, own_params, config)
    opp_width = 5 if isinstance(opp_params, CarParams) else 4
    if flag == 1 and measurement_state is not None:
        opp = _normalize_state(measurement_state, opp_params, config)
    else:
        opp = np.zeros(opp_width)
    vec = np.concatenate([own, opp, [float(flag)], [t / config.timeout]])
    # pad car-vs-car observations to the fixed width
    full_width = max(len(vec), 12) if (config.pursuer.kind == "car"
                                       and config.evader.kind == "car") else len(vec)
    if full_width > len(vec):
        vec = np.concatenate([vec, np.zeros(full_width - len(vec))])

    if np.any(np.abs(vec) > 1.0 + 1e-9):
        log.warning("observation entries outside [-1, 1], clamping: %s", vec)
    return np.clip(vec, -1.0, 1.0)
