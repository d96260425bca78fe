"""Supervised, semi-supervised and unsupervised training regimes."""

from kedro_selfnotes.paradigms.ablation import evaluate_ablation_no_notes
from kedro_selfnotes.paradigms.config import LadderConfig, RegimeConfig
from kedro_selfnotes.paradigms.ladder import LadderStage, run_ladder
from kedro_selfnotes.paradigms.sequences import build_training_sequences
from kedro_selfnotes.paradigms.unsupervised import (
    EnrichedSample,
    finetune_on_enrichments,
    generate_enriched_corpus,
    train_unsupervised_sequential,
)

__all__ = [
    "EnrichedSample",
    "LadderConfig",
    "LadderStage",
    "RegimeConfig",
    "build_training_sequences",
    "evaluate_ablation_no_notes",
    "finetune_on_enrichments",
    "generate_enriched_corpus",
    "run_ladder",
    "train_unsupervised_sequential",
]
