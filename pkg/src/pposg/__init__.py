"""Pursuit-evasion stochastic game: simulation, belief models, MARL training,
grid-game solver, evaluation tooling and a live arena service."""

from .config import AgentConfig, ConfigError, EnvConfig, TrainConfig

__all__ = ["AgentConfig", "ConfigError", "EnvConfig", "TrainConfig"]
__version__ = "0.1.0"
