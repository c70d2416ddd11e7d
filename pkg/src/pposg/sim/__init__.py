from .types import (Action, CarParams, CarState, JointState,
                    ModelIntegrityError, PointMassParams, PointMassState,
                    SensorParams, wrap_angle)
from .dynamics import step_agent, step_car, step_pointmass
from .sensing import measure, visibility

_ENV_NAMES = ("PursuitEvasionEnv", "StepResult", "TerminalStepError",
              "VectorEnv", "curriculum", "reward", "build_observation")


def __getattr__(name):
    # env/observation depend on the top-level config module, which itself
    # imports .types from here; resolve them lazily to break the cycle.
    if name in _ENV_NAMES:
        from . import env, observation
        mod = observation if name == "build_observation" else env
        return getattr(mod, name)
    raise AttributeError(name)

__all__ = [
    "Action", "CarParams", "CarState", "JointState", "ModelIntegrityError",
    "PointMassParams", "PointMassState", "SensorParams", "wrap_angle",
    "step_agent", "step_car", "step_pointmass",
    "measure", "visibility", "build_observation",
    "PursuitEvasionEnv", "StepResult", "TerminalStepError", "VectorEnv",
    "curriculum", "reward",
]
