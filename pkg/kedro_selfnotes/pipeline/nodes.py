"""Node functions wiring the workbench modules into Kedro pipelines.

Every node takes the resolved :class:`~kedro_selfnotes.config.ExperimentConfig`
as its first input and talks to the rest of the run only through catalog
entries.
"""

import logging
from dataclasses import replace
from typing import Any, Dict, List, Sequence, Tuple

import pandas as pd
from upath import UPath

from kedro_selfnotes.config import ExperimentConfig
from kedro_selfnotes.corpus.chess_games import ingest_chess_games, load_fixture_games
from kedro_selfnotes.corpus.generate import generate_split, split_stats
from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.evalharness.dummy import run_dummy_ablation
from kedro_selfnotes.evalharness.evaluate import EvalReport, evaluate
from kedro_selfnotes.evalharness.report import render_table, report_frame
from kedro_selfnotes.evalharness.splits import resolve_split
from kedro_selfnotes.io.checkpoint_dataset import Checkpoint
from kedro_selfnotes.paradigms.ablation import evaluate_ablation_no_notes
from kedro_selfnotes.paradigms.ladder import run_ladder, stage_decode_configs, train_base_model
from kedro_selfnotes.paradigms.sequences import build_training_sequences
from kedro_selfnotes.paradigms.unsupervised import train_unsupervised_sequential
from kedro_selfnotes.textmodel.training import TrainReport, train
from kedro_selfnotes.textmodel.transformer import ModelState, init_model

logger = logging.getLogger(__name__)

Splits = Dict[str, List[Sample]]


def _replicate(config: ExperimentConfig, k: int) -> ExperimentConfig:
    """Config of the ``k``-th seed replicate."""
    if k == 0:
        return config
    return replace(
        config,
        model=replace(config.model, seed=config.model.seed + k),
        train=replace(config.train, seed=config.train.seed + k),
        regime=replace(config.regime, seed=config.regime.seed + k),
    )


def _fresh_model(config: ExperimentConfig, vocab: Vocabulary) -> ModelState:
    return init_model(replace(config.model, vocab_size=len(vocab)), vocab)


def resolve_manifest(config: ExperimentConfig) -> Dict[str, Any]:
    """The resolved config, written as the run manifest."""
    logger.info(f"Manifest hash {config.manifest_hash}")
    return config.to_dict()


def generate_splits(config: ExperimentConfig) -> Splits:
    """Generates every split of ``config.task``."""
    games = None
    if config.task.startswith("chess"):
        games = ingest_chess_games(config.gen.games).games if config.gen.games else load_fixture_games()
    configs = config.gen.task_configs()
    return {
        name: generate_split(config.task, name, request, config.seed, configs, games)
        for name, request in config.gen.split_requests(config.task).items()
    }


def corpus_stats(config: ExperimentConfig, splits: Splits) -> Dict[str, Any]:
    """Stats sidecar: histograms and note density per split."""
    return {
        "task": config.task,
        "seed": config.seed,
        "manifest_hash": config.manifest_hash,
        "splits": {name: split_stats(samples) for name, samples in splits.items()},
    }


def build_vocabulary(config: ExperimentConfig, splits: Splits) -> Vocabulary:
    samples = [sample for rows in splits.values() for sample in rows]
    vocab = Vocabulary.build(config.task, samples)
    logger.info(f"Vocabulary of {len(vocab)} tokens for {config.task}")
    return vocab


def _validation_accuracy(config: ExperimentConfig, splits: Splits):
    valid = splits.get("valid") or []
    if not config.train.eval_every or not valid:
        return None
    split = resolve_split(config.task, config.eval.split)
    dc = config.decode

    def _accuracy(state: ModelState) -> float:
        report = evaluate(state, valid, config.regime.method, dc, split, workers=1)
        return report.accuracy or 0.0

    return _accuracy


def fit_model(config: ExperimentConfig, splits: Splits, vocab: Vocabulary) -> Tuple[ModelState, TrainReport]:
    """Trains a fresh model under ``config.regime``."""
    rc, tc = config.regime, config.train
    state = _fresh_model(config, vocab)
    train_samples = splits["train"]
    if rc.regime == "unsupervised":
        report = train_unsupervised_sequential(state, train_samples, tc, config.decode, rc)
    else:
        sequences = build_training_sequences(train_samples, rc.method, config=rc)
        report = train(state, sequences, tc, _validation_accuracy(config, splits))
    return state, report


def train_model(
    config: ExperimentConfig, splits: Splits, vocab: Vocabulary
) -> Tuple[Checkpoint, pd.DataFrame]:
    state, report = fit_model(config, splits, vocab)
    logger.info(f"Trained {config.regime.method} model to loss {report.final_loss:.4f}")
    return Checkpoint(state, config.manifest_hash), report.to_frame()


def _test(config: ExperimentConfig, splits: Splits) -> List[Sample]:
    assert splits.get("test"), "the data directory holds no test split"
    return splits["test"]


def _tables(reports: Sequence[EvalReport]) -> Tuple[pd.DataFrame, str]:
    frame = report_frame(reports)
    return frame, render_table(frame)


def evaluate_checkpoints(
    config: ExperimentConfig, splits: Splits, *checkpoints: Checkpoint
) -> Tuple[pd.DataFrame, str, List[Dict[str, Any]]]:
    """Evaluates each checkpoint as one seed replicate; traces come from the first."""
    assert checkpoints, "at least one checkpoint is needed"
    test = _test(config, splits)
    split = resolve_split(config.task, config.eval.split)
    reports = []
    for checkpoint in checkpoints:
        state = checkpoint.state
        dc = config.decode.validate(state.max_positions)
        reports.append(
            evaluate(
                state,
                test,
                config.eval_method,
                dc,
                split,
                config.manifest_hash,
                seed=state.config.seed,
                keep_traces=config.eval.keep_traces and not reports,
            )
        )
    frame, table = _tables(reports)
    return frame, table, reports[0].traces


def ablate_dummy(
    config: ExperimentConfig, splits: Splits, vocab: Vocabulary
) -> Tuple[pd.DataFrame, str]:
    """Dummy-token ablation, every arm trained from scratch per seed replicate."""
    test = _test(config, splits)
    split = resolve_split(config.task, config.eval.split)
    reports: List[EvalReport] = []
    for k in range(config.eval.replicates):
        replicate = _replicate(config, k)

        def _factory(method: str, samples: Sequence[Sample]) -> ModelState:
            state = _fresh_model(replicate, vocab)
            train(state, build_training_sequences(samples, method), replicate.train)
            return state

        arms = run_dummy_ablation(
            _factory,
            splits["train"],
            test,
            config.decode,
            split,
            config.ablation.arms,
            config.ablation.count_per_site,
            config.manifest_hash,
            seed=replicate.model.seed,
        )
        reports.extend(arms.values())
    return _tables(reports)


def ablate_no_notes(
    config: ExperimentConfig, splits: Splits, checkpoint: Checkpoint
) -> Tuple[pd.DataFrame, str]:
    """Self-Notes decode next to note writing switched off and gold notes fed in."""
    test = _test(config, splits)
    split = resolve_split(config.task, config.eval.split)
    state = checkpoint.state
    dc = config.decode.validate(state.max_positions)
    seed = state.config.seed
    reports = [
        evaluate(state, test, "selfnotes", dc, split, config.manifest_hash, seed),
        evaluate_ablation_no_notes(state, test, dc, split, False, config.manifest_hash, seed),
        evaluate_ablation_no_notes(state, test, dc, split, True, config.manifest_hash, seed),
    ]
    return _tables(reports)


def ladder(
    config: ExperimentConfig, splits: Splits, vocab: Vocabulary, run_dir: str
) -> Tuple[pd.DataFrame, str]:
    """Runs the ladder per seed replicate; stage directories go under ``run_dir``.

    A single replicate writes ``<run_dir>/<stage>``, several write
    ``<run_dir>/seed_<seed>/<stage>``.
    """
    test = _test(config, splits)
    split = resolve_split(config.task, config.eval.split)
    reports: List[EvalReport] = []
    for k in range(config.eval.replicates):
        replicate = _replicate(config, k)
        notes_dc = stage_decode_configs(replicate.decode, replicate.ladder)["notes"]
        base = train_base_model(
            splits["train"],
            vocab,
            replace(replicate.model, vocab_size=len(vocab)),
            replicate.train,
            notes_dc,
            replicate.ladder,
            replace(replicate.regime, regime="unsupervised"),
        )
        out = UPath(run_dir)
        if config.eval.replicates > 1:
            out = out / f"seed_{replicate.model.seed}"
        stages = run_ladder(
            splits["train"],
            test,
            base,
            replicate.decode,
            replicate.train,
            split,
            replicate.ladder,
            replace(replicate.regime, regime="unsupervised"),
            out,
            config.manifest_hash,
        )
        reports.extend(stage.report for stage in stages)
    return _tables(reports)
