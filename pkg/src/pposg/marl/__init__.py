from .buffers import BeliefBuffer, ReplayBuffer, Transition
from .maddpg import AGENTS, MaddpgEnsemble
from .trainer import Trainer, load_trained_ensemble, train

__all__ = ["BeliefBuffer", "ReplayBuffer", "Transition",
           "AGENTS", "MaddpgEnsemble",
           "Trainer", "load_trained_ensemble", "train"]
