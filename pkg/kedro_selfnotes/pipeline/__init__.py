"""Kedro pipelines behind the command-line surface."""

from kedro_selfnotes.pipeline.pipelines import (
    ablate_pipeline,
    create_pipelines,
    eval_pipeline,
    gen_pipeline,
    ladder_pipeline,
    train_pipeline,
    with_manifest,
)
from kedro_selfnotes.pipeline.runner import run_pipeline

__all__ = [
    "ablate_pipeline",
    "create_pipelines",
    "eval_pipeline",
    "gen_pipeline",
    "ladder_pipeline",
    "run_pipeline",
    "train_pipeline",
    "with_manifest",
]
