"""Agent policies: scripted baselines plus the learned-actor wrapper.

All policies consume the normalized observation vector and emit actions
in [-1, 1]^2. Scripted policies are deterministic given a seed and the
observation sequence.
"""

from __future__ import annotations

import math

import numpy as np

from .belief import (BiMDN, MIXED_SAMPLES, ObservationHistory, UkfBelief,
                     belief_features, initial_belief, ukf_step)
from .config import EnvConfig
from .nn.layers import MLP
from .nn.tensor import Tensor
from .sim.types import Action

SPIN_DECISIONS = 25
SEARCH_RESAMPLE_EVERY = 8
RANDOM_WALK_RESAMPLE_EVERY = 25


class Policy:
    """Observation in, action out; internal mode state allowed."""

    def reset(self, seed: int | None = None) -> None:
        pass

    def act(self, obs: np.ndarray) -> Action:
        raise NotImplementedError


def _denorm_position(obs_xy: np.ndarray, config: EnvConfig) -> np.ndarray:
    cx, cy = config.center
    hx, hy = config.half_extents
    return np.array([cx + obs_xy[0] * hx, cy + obs_xy[1] * hy])


class PurePursuitPolicy(Policy):
    """Modified pure pursuit for the car pursuer.

    Visible evader: steer toward a lookahead point on the pursuer-evader
    segment at full throttle. On losing sight after at least one detection:
    maximum steering velocity in a direction drawn once per loss event, held
    for 25 decisions. Before the first detection (and after a fruitless
    spin): random-walk search, steering resampled every 8th decision, full
    forward velocity.
    """

    def __init__(self, config: EnvConfig, lookahead: float = 1.0):
        if config.pursuer.kind != "car":
            raise ValueError("pure pursuit drives the car pursuer")
        self.config = config
        self.params = config.pursuer.car
        self.lookahead = lookahead
        self.dt_decision = config.dt * config.frame_skip
        self.reset()

    def reset(self, seed: int | None = None) -> None:
        self.rng = np.random.default_rng(seed)
        self.ever_seen = False
        self.spin_left = 0
        self.spin_dir = 1.0
        self.search_steps = 0
        self.search_u1 = 0.0

    def act(self, obs: np.ndarray) -> Action:
        own = obs[:5]
        flag = obs[-2]
        if flag > 0:
            self.ever_seen = True
            self.spin_left = 0
            return self._track(own, obs[5:-2])
        if self.ever_seen:
            if self.spin_left == 0 and self.search_steps == 0:
                # sight just lost: spin in an arbitrary direction
                self.spin_dir = 1.0 if self.rng.random() < 0.5 else -1.0
                self.spin_left = SPIN_DECISIONS
            if self.spin_left > 0:
                self.spin_left -= 1
                if self.spin_left == 0:
                    self.ever_seen = False  # fall back to search next decision
                return Action(self.spin_dir, 1.0)
        if self.search_steps % SEARCH_RESAMPLE_EVERY == 0:
            self.search_u1 = float(self.rng.uniform(-1.0, 1.0))
        self.search_steps += 1
        return Action(self.search_u1, 1.0)

    def _track(self, own: np.ndarray, opp: np.ndarray) -> Action:
        self.search_steps = 0
        cfg = self.config
        pos = _denorm_position(own[:2], cfg)
        delta = own[2] * self.params.delta_max
        psi = own[4] * math.pi
        target = _denorm_position(opp[:2], cfg)
        to_target = target - pos
        dist = float(np.linalg.norm(to_target))
        if dist < 1e-9:
            return Action(0.0, 1.0)
        ld = min(self.lookahead, dist)
        alpha = math.atan2(to_target[1], to_target[0]) - psi
        alpha = (alpha + math.pi) % (2.0 * math.pi) - math.pi
        curvature = 2.0 * math.sin(alpha) / ld
        delta_desired = math.atan(curvature * self.params.wheelbase)
        delta_desired = float(np.clip(delta_desired, -self.params.delta_max,
                                      self.params.delta_max))
        u1 = (delta_desired - delta) / (self.params.ddelta_max * self.dt_decision)
        return Action(float(np.clip(u1, -1.0, 1.0)), 1.0)


class RandomWalkEvaderPolicy(Policy):
    """Point-mass evader resampling both accelerations every 25 decisions."""

    def __init__(self, seed: int | None = None):
        self.reset(seed)

    def reset(self, seed: int | None = None) -> None:
        self.rng = np.random.default_rng(seed)
        self.steps = 0
        self.current = Action(0.0, 0.0)

    def act(self, obs: np.ndarray) -> Action:
        if self.steps % RANDOM_WALK_RESAMPLE_EVERY == 0:
            u = self.rng.uniform(-1.0, 1.0, size=2)
            self.current = Action(float(u[0]), float(u[1]))
        self.steps += 1
        return self.current


class GreedyEvaderPolicy(Policy):
    """Flees along the pursuer-evader line when the pursuer is visible.

    The unit retreat direction is scaled per axis so its largest component
    saturates at +-1; invisible pursuer means zero action.
    """

    def __init__(self, config: EnvConfig):
        self.config = config

    def act(self, obs: np.ndarray) -> Action:
        own_width = 5 if self.config.evader.kind == "car" else 4
        flag = obs[-2]
        if flag < 0:
            return Action(0.0, 0.0)
        own_pos = _denorm_position(obs[:2], self.config)
        opp_pos = _denorm_position(obs[own_width:own_width + 2], self.config)
        away = own_pos - opp_pos
        norm = float(np.linalg.norm(away))
        if norm < 1e-9:
            return Action(0.0, 0.0)
        direction = away / norm
        scale = max(abs(direction[0]), abs(direction[1]))
        direction = direction / scale
        return Action(float(direction[0]), float(direction[1]))


def learned_act(actor: MLP, actor_input: np.ndarray, exploration_sigma: float,
                rng: np.random.Generator | None) -> np.ndarray:
    """Deterministic actor output plus optional exploration noise, clamped."""
    out = actor(Tensor(actor_input[None, :], dtype=np.float32)).data[0].astype(np.float64)
    if exploration_sigma > 0:
        if rng is None:
            raise ValueError("exploration noise requires an rng")
        out = out + rng.normal(0.0, exploration_sigma, size=out.shape)
    return np.clip(out, -1.0, 1.0)


class LearnedPolicy(Policy):
    """Actor network plus frame stacking and optional belief attachment."""

    def __init__(self, actor: MLP, config: EnvConfig, agent: str,
                 variant: str = "none", bimdn: BiMDN | None = None,
                 history_length: int = 200, history_downsample: int = 10,
                 exploration_sigma: float = 0.0, seed: int | None = None):
        self.actor = actor
        self.config = config
        self.agent = agent
        self.variant = variant
        self.bimdn = bimdn
        if variant in ("ours", "ours_mixed") and bimdn is None:
            raise ValueError(f"variant {variant!r} needs a belief network")
        self.exploration_sigma = exploration_sigma
        self.obs_width = config.observation_width(agent)
        self.history = ObservationHistory(self.obs_width, history_length,
                                          history_downsample)
        self.reset(seed)

    def reset(self, seed: int | None = None) -> None:
        self.rng = np.random.default_rng(seed)
        self.prev_obs: np.ndarray | None = None
        self.history.reset()
        self.ukf: UkfBelief = initial_belief()

    def _belief_feature_rows(self, obs: np.ndarray) -> np.ndarray:
        cfg = self.config
        if self.variant == "ukf":
            opp = cfg.evader if self.agent == "pursuer" else cfg.pursuer
            flag = obs[-2]
            measurement = None
            if flag > 0:
                own_width = 5 if (cfg.pursuer if self.agent == "pursuer" else cfg.evader).kind == "car" else 4
                block = obs[own_width:own_width + opp.state_width]
                pos = _denorm_position(block[:2], cfg)
                if opp.kind == "pointmass":
                    vel = block[2:4] * opp.pointmass.v_max
                else:
                    vel_mag = block[3] * max(abs(opp.car.v_min), opp.car.v_max)
                    psi = block[4] * math.pi
                    vel = np.array([vel_mag * math.cos(psi), vel_mag * math.sin(psi)])
                measurement = np.concatenate([pos, vel])
            self.ukf = ukf_step(self.ukf, measurement, cfg.dt * cfg.frame_skip)
            v_norm = (opp.pointmass.v_max if opp.kind == "pointmass"
                      else max(abs(opp.car.v_min), opp.car.v_max))
            feats = belief_features("ukf", self.ukf, cfg.center, cfg.half_extents,
                                    velocity_norm=v_norm)
            return feats[None, :]
        mix = self.bimdn.predict(*self.history.window(), cfg.center, cfg.half_extents)
        feats = belief_features(self.variant, mix, cfg.center, cfg.half_extents,
                                rng=self.rng)
        if self.variant == "ours":
            return feats[None, :]
        return feats  # (16, 2) sample rows for the mixed strategy

    def act(self, obs: np.ndarray) -> Action:
        obs = np.asarray(obs, dtype=np.float64)
        self.history.push(obs)
        prev = obs if self.prev_obs is None else self.prev_obs
        stacked = np.concatenate([prev, obs])
        self.prev_obs = obs
        if self.variant == "none":
            out = learned_act(self.actor, stacked, self.exploration_sigma, self.rng)
            return Action(float(out[0]), float(out[1]))
        rows = self._belief_feature_rows(obs)
        inputs = np.concatenate(
            [np.repeat(stacked[None, :], len(rows), axis=0), rows], axis=1)
        outs = self.actor(Tensor(inputs, dtype=np.float32)).data.astype(np.float64)
        out = outs.mean(axis=0)  # mixed strategy averages per-sample actions
        if self.exploration_sigma > 0:
            out = out + self.rng.normal(0.0, self.exploration_sigma, size=out.shape)
        out = np.clip(out, -1.0, 1.0)
        return Action(float(out[0]), float(out[1]))
