from .hparams import HyperParams
from .network import (BeepParams, RankedEntry, RankedPrediction, forward, init_params, loss,
                      loss_value, raw_scores)
from .predict import WHOLE_METHOD, load_model, predict_candidates, predict_ranked, save_model, scoped_candidates
from .train import TrainingLog, prepare_examples, train
from .vocab import UNK, Vocab, build_vocab

__all__ = [
    "UNK", "WHOLE_METHOD", "BeepParams", "HyperParams", "RankedEntry", "RankedPrediction", "TrainingLog",
    "Vocab", "build_vocab", "forward", "init_params", "load_model", "loss", "loss_value",
    "predict_candidates", "predict_ranked", "prepare_examples", "raw_scores", "save_model",
    "scoped_candidates", "train",
]
