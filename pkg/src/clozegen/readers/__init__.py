from .models import (GA, ATT, AMWG, ReaderModel, ReaderItem, TrainingConfig,
                     train, predict_topk, load_checkpoint, evaluate_accuracy)
from .gru import BiGRUEncoder

__all__ = ["GA", "ATT", "AMWG", "ReaderModel", "ReaderItem", "TrainingConfig",
           "train", "predict_topk", "load_checkpoint", "evaluate_accuracy",
           "BiGRUEncoder"]
