"""Run configuration: environment and training settings, JSON round-trip,
and PPOSG_* environment-variable overrides.

The unscaled defaults reproduce the full training recipe; desk-scale runs
shrink budgets through the CLI scale multiplier or explicit overrides.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any

from .sim.types import CarParams, PointMassParams, SensorParams


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class AgentConfig:
    kind: str  # "car" | "pointmass"
    sensor: SensorParams
    car: CarParams | None = None
    pointmass: PointMassParams | None = None

    def __post_init__(self):
        if self.kind not in ("car", "pointmass"):
            raise ConfigError(f"unknown agent kind {self.kind!r}")
        if self.kind == "car" and self.car is None:
            object.__setattr__(self, "car", CarParams())
        if self.kind == "pointmass" and self.pointmass is None:
            object.__setattr__(self, "pointmass", PointMassParams())

    @property
    def dynamics_params(self):
        return self.car if self.kind == "car" else self.pointmass

    @property
    def state_width(self) -> int:
        return 5 if self.kind == "car" else 4


@dataclass(frozen=True)
class EnvConfig:
    x_low: float = -8.0
    x_high: float = 8.0
    y_low: float = -8.0
    y_high: float = 8.0
    dt: float = 0.1
    frame_skip: int = 2
    timeout: int = 400
    agent_radius: float = 0.25
    lambda_capture: float = 1000.0
    lambda_t: float = 1.0
    lambda_d: float = 1.0
    curriculum_fraction: float = 0.3
    random_yaw: bool = False
    pursuer: AgentConfig = field(default_factory=lambda: AgentConfig(
        kind="car", sensor=SensorParams(fov_angle=2.0 * math.pi / 3.0, range=6.0)))
    evader: AgentConfig = field(default_factory=lambda: AgentConfig(
        kind="pointmass", sensor=SensorParams(fov_angle=2.0 * math.pi, range=6.0)))

    def __post_init__(self):
        if not (self.x_low < self.x_high and self.y_low < self.y_high):
            raise ConfigError("workspace bounds must be ordered")
        if self.dt <= 0 or self.timeout <= 0 or self.agent_radius <= 0:
            raise ConfigError("dt, timeout and agent_radius must be positive")
        if self.frame_skip < 1:
            raise ConfigError("frame_skip must be >= 1")

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_low + self.x_high) / 2.0, (self.y_low + self.y_high) / 2.0)

    @property
    def half_extents(self) -> tuple[float, float]:
        return ((self.x_high - self.x_low) / 2.0, (self.y_high - self.y_low) / 2.0)

    @property
    def capture_distance(self) -> float:
        return 2.0 * self.agent_radius

    def observation_width(self, agent: str) -> int:
        own = self.pursuer if agent == "pursuer" else self.evader
        opp = self.evader if agent == "pursuer" else self.pursuer
        width = own.state_width + opp.state_width + 2
        # car-vs-car observations are padded to a fixed width of 12
        return max(width, 12) if (self.pursuer.kind == "car" and self.evader.kind == "car") else width


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 20000
    num_envs: int = 8
    gamma: float = 0.99
    tau: float = 0.005
    actor_lr: float = 0.0005
    critic_lr: float = 0.0005
    hidden_sizes: tuple[int, int] = (128, 128)
    replay_capacity: int = 100000
    batch_size: int = 512
    update_warmup: int = 1000
    update_every: int = 1
    exploration_sigma: float = 0.1
    belief_variant: str = "ours"  # none | ours | ours_mixed | ukf
    bimdn_hidden: int = 128
    bimdn_fc: int = 32
    bimdn_components: int = 3
    bimdn_lr: float = 0.002
    bimdn_batch: int = 256
    bimdn_update_every: int = 10
    bimdn_buffer_capacity: int = 25000
    bimdn_warmup: int = 10000
    history_length: int = 200
    history_downsample: int = 10
    checkpoint_every: int = 250
    metrics_every_steps: int = 500
    env: EnvConfig = field(default_factory=EnvConfig)

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("gamma must lie in [0, 1]")
        for name in ("episodes", "num_envs", "batch_size", "replay_capacity",
                     "checkpoint_every", "bimdn_batch"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.belief_variant not in ("none", "ours", "ours_mixed", "ukf"):
            raise ConfigError(f"unknown belief variant {self.belief_variant!r}")


# -- JSON serialization -------------------------------------------------------

def _to_jsonable(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, tuple):
        return list(obj)
    return obj


def env_config_to_dict(cfg: EnvConfig) -> dict:
    return _to_jsonable(cfg)


def train_config_to_dict(cfg: TrainConfig) -> dict:
    return _to_jsonable(cfg)


def _agent_from_dict(d: dict, path: str) -> AgentConfig:
    try:
        sensor = SensorParams(**d["sensor"])
    except KeyError as e:
        raise ConfigError(f"missing key {path}.sensor") from e
    car = CarParams(**d["car"]) if d.get("car") else None
    pm = PointMassParams(**d["pointmass"]) if d.get("pointmass") else None
    return AgentConfig(kind=d.get("kind", "car"), sensor=sensor, car=car, pointmass=pm)


def env_config_from_dict(d: dict) -> EnvConfig:
    d = dict(d)
    for key in ("pursuer", "evader"):
        if key in d and isinstance(d[key], dict):
            d[key] = _agent_from_dict(d[key], key)
    try:
        return EnvConfig(**d)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def train_config_from_dict(d: dict) -> TrainConfig:
    d = dict(d)
    if "env" in d and isinstance(d["env"], dict):
        d["env"] = env_config_from_dict(d["env"])
    if "hidden_sizes" in d:
        d["hidden_sizes"] = tuple(d["hidden_sizes"])
    try:
        return TrainConfig(**d)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def apply_env_overrides(d: dict, environ: dict | None = None) -> dict:
    """Override top-level config keys via PPOSG_<KEY> variables."""
    environ = os.environ if environ is None else environ
    out = dict(d)
    for key, value in environ.items():
        if not key.startswith("PPOSG_"):
            continue
        name = key[len("PPOSG_"):].lower()
        if name in out:
            try:
                out[name] = json.loads(value)
            except json.JSONDecodeError:
                out[name] = value
    return out


def load_train_config(path: str) -> TrainConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    return train_config_from_dict(apply_env_overrides(raw))


def config_hash(d: dict) -> str:
    import hashlib
    return hashlib.sha256(
        json.dumps(d, sort_keys=True, separators=(",", ":")).encode()).hexdigest()[:16]
