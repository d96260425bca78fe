"""Unsupervised ladder and inference ablation tests."""

from dataclasses import replace
from pathlib import Path
from typing import List

from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.evalharness.report import load_report
from kedro_selfnotes.evalharness.splits import SplitSpec
from kedro_selfnotes.io.catalog import run_datasets
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.paradigms.ablation import evaluate_ablation_no_notes
from kedro_selfnotes.paradigms.config import LadderConfig
from kedro_selfnotes.paradigms.ladder import run_ladder, stage_decode_configs, train_base_model
from kedro_selfnotes.textmodel.config import ModelConfig, TrainConfig
from kedro_selfnotes.textmodel.oracle import make_oracle_model

SPLIT = SplitSpec.parse("toy_story", "1-3,4*")


def test_stage_configs_add_one_knob_each():
    """Each stage differs from the previous one by the knob it adds."""
    ladder = LadderConfig(boost=3.0, num_samples=4, note_start=["Q:"])
    configs = stage_decode_configs(DecodeConfig(boost=2.0), ladder)
    assert configs["vanilla"].boost == 2.0
    assert configs["notes"].boost == 1.0 and configs["notes"].note_start == ["Q:"]
    assert configs["boost"] == replace(configs["notes"], boost=3.0)
    assert configs["multi"].num_samples == 4 and configs["multi"].sampling == "temperature"
    assert configs["finetune"] == configs["multi"]


def test_oracle_ladder(tmp_path: Path, toy_samples: List[Sample], toy_vocab: Vocabulary):
    """An oracle answers at every stage; finetuning needs a trainable model.

    Args:
        tmp_path (Path): pytest temporary directory
        toy_samples (List[Sample]): hand-written samples
        toy_vocab (Vocabulary): toy story vocabulary
    """
    oracle = make_oracle_model("toy_story", "selfnotes", toy_vocab, toy_samples)
    stages = run_ladder(
        toy_samples,
        toy_samples,
        oracle,
        DecodeConfig(),
        TrainConfig(epochs=1),
        SPLIT,
        LadderConfig(num_samples=2),
        out_dir=tmp_path,
        manifest_hash="abc",
    )
    assert [stage.name for stage in stages] == ["vanilla", "notes", "boost", "multi"]
    assert all(stage.report.accuracy == 1.0 for stage in stages)
    report = load_report(tmp_path / "multi" / "report.csv")
    assert list(report["method"]) == ["multi", "multi"]
    assert not (tmp_path / "multi" / "checkpoint.pt").exists()


def test_trained_ladder_writes_checkpoints(
    tmp_path: Path,
    tiny_model_config: ModelConfig,
    toy_samples: List[Sample],
    toy_vocab: Vocabulary,
):
    """A trained base model runs through finetuning and leaves a checkpoint per stage.

    Args:
        tmp_path (Path): pytest temporary directory
        tiny_model_config (ModelConfig): tiny model shape
        toy_samples (List[Sample]): hand-written samples
        toy_vocab (Vocabulary): toy story vocabulary
    """
    dc = DecodeConfig(max_note_len=4, max_answer_len=4, context_cap=128)
    ladder = LadderConfig(stages=["vanilla", "multi", "finetune"], num_samples=2)
    tc = TrainConfig(batch_size=2, epochs=1)
    base = train_base_model(
        toy_samples,
        toy_vocab,
        replace(tiny_model_config, vocab_size=len(toy_vocab)),
        tc,
        stage_decode_configs(dc, ladder)["notes"],
        ladder,
    )
    stages = run_ladder(toy_samples, toy_samples, base, dc, tc, SPLIT, ladder, out_dir=tmp_path)
    assert [stage.name for stage in stages] == ["vanilla", "multi", "finetune"]
    assert stages[-1].model is not base
    assert len(stages[-1].corpus) == len(toy_samples)
    datasets = run_datasets(tmp_path / "finetune")
    assert datasets["checkpoint"].exists()
    assert len(datasets["corpus"].load()) == len(toy_samples)


def test_no_notes_ablation(toy_samples: List[Sample], toy_vocab: Vocabulary):
    """Switching notes off or feeding gold notes are reported under their own names.

    Args:
        toy_samples (List[Sample]): hand-written samples
        toy_vocab (Vocabulary): toy story vocabulary
    """
    oracle = make_oracle_model("toy_story", "selfnotes", toy_vocab, toy_samples)
    bare = evaluate_ablation_no_notes(oracle, toy_samples, DecodeConfig(), SPLIT)
    gold = evaluate_ablation_no_notes(oracle, toy_samples, DecodeConfig(), SPLIT, gold_notes=True)
    assert (bare.method, gold.method) == ("no_notes", "gold_notes")
    assert gold.accuracy == 1.0
    assert gold.bucket("1-3").mean_note_tokens > 0
    assert bare.bucket("1-3").mean_note_tokens == 0
