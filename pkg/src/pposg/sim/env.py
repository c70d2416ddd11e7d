"""The two-player pursuit-evasion environment and its vectorized wrapper.

Each decision step holds both actions for ``frame_skip`` Euler substeps.
Capture is checked after every substep; the decision counter is checked
against the timeout once per decision. Rewards are exactly zero-sum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from ..config import EnvConfig
from .dynamics import step_agent
from .observation import build_observation
from .sensing import measure, visibility
from .types import (Action, CarState, JointState, PointMassParams,
                    PointMassState, SensorParams)


class TerminalStepError(Exception):
    """Stepping an environment whose episode already ended."""


def reward(distance: float, captured: bool, timed_out: bool,
           lambda_capture: float, lambda_t: float, lambda_d: float) -> tuple[float, float]:
    """Pursuer/evader rewards; the evader's is the exact negation."""
    if captured:
        r_p = lambda_capture
    elif timed_out:
        r_p = -lambda_capture
    else:
        r_p = -(lambda_t + lambda_d * distance)
    return r_p, -r_p


def curriculum(episode_index: int, total_episodes: int, config: EnvConfig,
               fraction: float | None = None) -> tuple[float, float]:
    """Pursuer FoV and evader speed limit for a given training episode.

    Starts from an omnidirectional pursuer sensor and a frozen evader,
    interpolating linearly to the configured values over the first
    ``fraction`` of training, constant afterwards.
    """
    fraction = config.curriculum_fraction if fraction is None else fraction
    target_fov = config.pursuer.sensor.fov_angle
    target_vmax = (config.evader.pointmass.v_max if config.evader.kind == "pointmass"
                   else config.evader.car.v_max)
    ramp_end = fraction * total_episodes
    if ramp_end <= 0 or episode_index >= ramp_end:
        return target_fov, target_vmax
    progress = episode_index / ramp_end
    fov = 2.0 * math.pi + (target_fov - 2.0 * math.pi) * progress
    vmax = target_vmax * progress
    return fov, vmax


@dataclass
class StepResult:
    state: JointState
    obs_p: np.ndarray
    obs_e: np.ndarray
    r_p: float
    r_e: float
    terminal: bool
    cause: str | None  # "capture" | "timeout" | None


class PursuitEvasionEnv:
    """Single deterministic environment instance (single-threaded owner)."""

    def __init__(self, config: EnvConfig):
        self.config = config
        self.state: JointState | None = None
        self.terminal = True
        self.cause: str | None = None
        # per-episode curriculum overrides
        self.pursuer_fov: float = config.pursuer.sensor.fov_angle
        self.evader_vmax: float | None = None

    # -- helpers --------------------------------------------------------------

    def _sensor(self, agent: str) -> SensorParams:
        cfg = self.config.pursuer if agent == "pursuer" else self.config.evader
        if agent == "pursuer" and self.pursuer_fov != cfg.sensor.fov_angle:
            return SensorParams(fov_angle=self.pursuer_fov, range=cfg.sensor.range)
        if cfg.kind == "pointmass":
            return SensorParams(fov_angle=2.0 * math.pi, range=cfg.sensor.range)
        return cfg.sensor

    def _evader_params(self):
        params = self.config.evader.dynamics_params
        if self.evader_vmax is not None:
            if isinstance(params, PointMassParams):
                params = replace(params, v_max=self.evader_vmax)
            else:
                params = replace(params, v_max=self.evader_vmax)
        return params

    def _clamp_to_workspace(self, state):
        """Clamp position to bounds and zero the outward velocity component."""
        c = self.config
        sx = min(max(state.sx, c.x_low), c.x_high)
        sy = min(max(state.sy, c.y_low), c.y_high)
        hit_x = sx != state.sx
        hit_y = sy != state.sy
        if not (hit_x or hit_y):
            return state
        state = state.with_position(sx, sy)
        if isinstance(state, PointMassState):
            vx, vy = state.vx, state.vy
            if hit_x and ((sx == c.x_high and vx > 0) or (sx == c.x_low and vx < 0)):
                vx = 0.0
            if hit_y and ((sy == c.y_high and vy > 0) or (sy == c.y_low and vy < 0)):
                vy = 0.0
            return replace(state, vx=vx, vy=vy)
        # car: stop if the heading points out of the workspace at the wall
        vx, vy = state.velocity_xy()
        outward = (hit_x and ((sx == c.x_high and vx > 0) or (sx == c.x_low and vx < 0))) or \
                  (hit_y and ((sy == c.y_high and vy > 0) or (sy == c.y_low and vy < 0)))
        return replace(state, v=0.0) if outward else state

    def _observe(self, state: JointState) -> tuple[np.ndarray, np.ndarray, int, int]:
        cfg = self.config
        p, e = state.pursuer, state.evader
        flag_p = visibility(p.position(), p.heading(), self._sensor("pursuer"), e.position())
        flag_e = visibility(e.position(), e.heading(), self._sensor("evader"), p.position())
        obs_p = build_observation(p, cfg.pursuer.dynamics_params,
                                  e if flag_p == 1 else None, cfg.evader.dynamics_params,
                                  flag_p, state.t, cfg)
        obs_e = build_observation(e, cfg.evader.dynamics_params,
                                  p if flag_e == 1 else None, cfg.pursuer.dynamics_params,
                                  flag_e, state.t, cfg)
        return obs_p, obs_e, flag_p, flag_e

    # -- public API -----------------------------------------------------------

    def reset(self, rng: np.random.Generator) -> StepResult:
        cfg = self.config
        while True:
            px = rng.uniform(cfg.x_low, cfg.x_high)
            py = rng.uniform(cfg.y_low, cfg.y_high)
            ex = rng.uniform(cfg.x_low, cfg.x_high)
            ey = rng.uniform(cfg.y_low, cfg.y_high)
            if math.hypot(px - ex, py - ey) > cfg.capture_distance:
                break
        def spawn(kind: str, x: float, y: float):
            if kind == "car":
                psi = rng.uniform(-math.pi, math.pi) if cfg.random_yaw else 0.0
                return CarState(sx=x, sy=y, psi=psi)
            return PointMassState(sx=x, sy=y)
        self.state = JointState(pursuer=spawn(cfg.pursuer.kind, px, py),
                                evader=spawn(cfg.evader.kind, ex, ey), t=0)
        self.terminal = False
        self.cause = None
        obs_p, obs_e, _, _ = self._observe(self.state)
        return StepResult(self.state, obs_p, obs_e, 0.0, 0.0, False, None)

    def step(self, a_p: Action, a_e: Action) -> StepResult:
        if self.terminal or self.state is None:
            raise TerminalStepError("episode is terminal; reset first")
        cfg = self.config
        p, e = self.state.pursuer, self.state.evader
        captured = False
        for _ in range(cfg.frame_skip):
            p = self._clamp_to_workspace(
                step_agent(p, a_p, cfg.pursuer.dynamics_params, cfg.dt))
            e = self._clamp_to_workspace(
                step_agent(e, a_e, self._evader_params(), cfg.dt))
            if math.hypot(p.sx - e.sx, p.sy - e.sy) <= cfg.capture_distance:
                captured = True
                break
        t = self.state.t + 1
        self.state = JointState(pursuer=p, evader=e, t=t)
        # a capture on the very decision that exhausts the budget is a timeout
        captured = captured and t < cfg.timeout
        timed_out = (not captured) and t >= cfg.timeout
        d = self.state.distance()
        r_p, r_e = reward(d, captured, timed_out,
                          cfg.lambda_capture, cfg.lambda_t, cfg.lambda_d)
        self.terminal = captured or timed_out
        self.cause = "capture" if captured else ("timeout" if timed_out else None)
        obs_p, obs_e, _, _ = self._observe(self.state)
        return StepResult(self.state, obs_p, obs_e, r_p, r_e, self.terminal, self.cause)

    def trajectory_record(self, result: StepResult, a_p: Action, a_e: Action) -> str:
        """One newline-delimited JSON trajectory log record."""
        s = result.state
        rec = {
            "t": s.t,
            "pursuer": s.pursuer.as_vector().tolist(),
            "evader": s.evader.as_vector().tolist(),
            "actions": {"pursuer": [a_p.u1, a_p.u2], "evader": [a_e.u1, a_e.u2]},
            "rewards": {"pursuer": result.r_p, "evader": result.r_e},
            "terminal": result.terminal,
            "cause": result.cause,
        }
        return json.dumps(rec, separators=(",", ":"))


class VectorEnv:
    """N independent environments with step-all / reset-done batching."""

    def __init__(self, config: EnvConfig, num_envs: int):
        self.envs = [PursuitEvasionEnv(config) for _ in range(num_envs)]

    def __len__(self) -> int:
        return len(self.envs)

    def reset_all(self, rng: np.random.Generator) -> list[StepResult]:
        return [env.reset(rng) for env in self.envs]

    def step_all(self, actions: list[tuple[Action, Action]]) -> list[StepResult]:
        return [env.step(a_p, a_e) for env, (a_p, a_e) in zip(self.envs, actions)]

    def set_curriculum(self, fov: float, evader_vmax: float) -> None:
        for env in self.envs:
            env.pursuer_fov = fov
            env.evader_vmax = evader_vmax
