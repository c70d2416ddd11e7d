from .tensor import Tensor, concat, set_default_dtype
from .layers import MLP, BiLSTM, Linear, LSTMCell, Module
from .optim import Adam, soft_update
from .checkpoint import (CheckpointFormatError, load_checkpoint,
                         save_checkpoint)

__all__ = [
    "Tensor", "concat", "set_default_dtype",
    "MLP", "BiLSTM", "Linear", "LSTMCell", "Module",
    "Adam", "soft_update",
    "save_checkpoint", "load_checkpoint", "CheckpointFormatError",
]
