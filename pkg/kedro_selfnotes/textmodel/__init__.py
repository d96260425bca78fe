"""Small decoder-only transformer, its training loop and a scripted oracle."""

from kedro_selfnotes.textmodel.config import ModelConfig, TrainConfig
from kedro_selfnotes.textmodel.oracle import OracleModel, make_oracle_model
from kedro_selfnotes.textmodel.training import TrainingSequence, TrainReport, train
from kedro_selfnotes.textmodel.transformer import (
    LanguageModel,
    ModelState,
    init_model,
    next_token_dist,
)

__all__ = [
    "LanguageModel",
    "ModelConfig",
    "ModelState",
    "OracleModel",
    "TrainConfig",
    "TrainReport",
    "TrainingSequence",
    "init_model",
    "make_oracle_model",
    "next_token_dist",
    "train",
]
