from . import tensor as ops
from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import gradient_check, relative_error
from .lstm import lstm, lstm_reference
from .optim import AdamState, adam_step
from .tensor import Tensor, backward

__all__ = [
    "AdamState", "Tensor", "adam_step", "backward", "gradient_check", "load_checkpoint",
    "lstm", "lstm_reference", "ops", "relative_error", "save_checkpoint",
]
