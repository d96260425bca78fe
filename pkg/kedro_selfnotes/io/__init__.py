"""Kedro datasets for corpora, vocabularies, checkpoints and run directories."""

from kedro_selfnotes.io.catalog import run_catalog, run_datasets
from kedro_selfnotes.io.checkpoint_dataset import Checkpoint, CheckpointDataset
from kedro_selfnotes.io.jsonl_dataset import JSONLinesDataset
from kedro_selfnotes.io.splits_dataset import SplitsDataset
from kedro_selfnotes.io.vocabulary_dataset import VocabularyDataset

__all__ = [
    "Checkpoint",
    "CheckpointDataset",
    "JSONLinesDataset",
    "SplitsDataset",
    "VocabularyDataset",
    "run_catalog",
    "run_datasets",
]
