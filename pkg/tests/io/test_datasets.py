"""Run-directory dataset tests."""

from dataclasses import replace
from pathlib import Path
from typing import List

import pytest
import torch
from kedro.io.core import DatasetError

from kedro_selfnotes.corpus.generate import split_stats
from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.io.catalog import input_dataset, run_catalog
from kedro_selfnotes.io.checkpoint_dataset import Checkpoint, CheckpointDataset
from kedro_selfnotes.io.jsonl_dataset import JSONLinesDataset
from kedro_selfnotes.io.splits_dataset import STATS_SUFFIX, SplitsDataset
from kedro_selfnotes.io.vocabulary_dataset import VocabularyDataset
from kedro_selfnotes.textmodel.config import ModelConfig
from kedro_selfnotes.textmodel.transformer import init_model


def test_samples_as_json_lines(tmp_path: Path, toy_samples: List[Sample]):
    """Samples are written with their field names and read back as samples.

    Args:
        tmp_path (Path): pytest temporary directory
        toy_samples (List[Sample]): hand-written samples
    """
    path = tmp_path / "train.jsonl"
    JSONLinesDataset(filepath=str(path), record_type="sample").save(toy_samples)
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first.startswith('{"task": "toy_story", "context": [')
    assert JSONLinesDataset(filepath=str(path), record_type="sample").load() == toy_samples


def test_unknown_record_type(tmp_path: Path):
    """Only samples and enriched samples are decoded.

    Args:
        tmp_path (Path): pytest temporary directory
    """
    with pytest.raises(DatasetError):
        JSONLinesDataset(filepath=str(tmp_path / "x.jsonl"), record_type="trace")


def test_splits_ignore_other_files(
    tmp_path: Path, toy_samples: List[Sample], program_samples: List[Sample]
):
    """Traces or corpora next to the splits are not loaded as splits.

    Args:
        tmp_path (Path): pytest temporary directory
        toy_samples (List[Sample]): hand-written toy samples
        program_samples (List[Sample]): hand-written program samples
    """
    SplitsDataset(path=str(tmp_path)).save({"train": toy_samples, "test": program_samples})
    JSONLinesDataset(filepath=str(tmp_path / "traces.jsonl")).save([{"id": 0}])
    loaded = SplitsDataset(path=str(tmp_path)).load()
    assert sorted(loaded) == ["test", "train"]
    assert loaded["test"] == program_samples


def test_splits_write_stats_sidecars(tmp_path: Path, toy_samples: List[Sample]):
    """Each saved split of samples gets a statistics file next to it.

    Args:
        tmp_path (Path): pytest temporary directory
        toy_samples (List[Sample]): hand-written toy samples
    """
    dataset = SplitsDataset(path=str(tmp_path))
    dataset.save({"train": toy_samples, "valid": toy_samples[:1]})
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "train.jsonl",
        f"train{STATS_SUFFIX}",
        "valid.jsonl",
        f"valid{STATS_SUFFIX}",
    ]
    stats = dataset.load_stats()
    assert stats == {"train": split_stats(toy_samples), "valid": split_stats(toy_samples[:1])}
    assert sorted(dataset.load()) == ["train", "valid"]


def test_raw_splits_have_no_stats(tmp_path: Path):
    """Splits saved without a record type are written as plain rows.

    Args:
        tmp_path (Path): pytest temporary directory
    """
    dataset = SplitsDataset(path=str(tmp_path), record_type=None)
    dataset.save({"test": [{"id": 0}, {"id": 1}]})
    assert dataset.load() == {"test": [{"id": 0}, {"id": 1}]}
    assert dataset.load_stats() == {}


def test_vocabulary_files(tmp_path: Path, toy_vocab: Vocabulary):
    """One token per line plus a sidecar of the special sets.

    Args:
        tmp_path (Path): pytest temporary directory
        toy_vocab (Vocabulary): toy story vocabulary
    """
    dataset = VocabularyDataset(filepath=str(tmp_path / "vocab.txt"))
    dataset.save(toy_vocab.with_note_tokens(["Q:"], ["."]))
    lines = (tmp_path / "vocab.txt").read_text().splitlines()
    assert lines == toy_vocab.tokens
    assert dataset.load().note_start == ("Q:",)
    assert (tmp_path / "vocab.yml").exists()


def test_checkpoint_round_trip(
    tmp_path: Path,
    tiny_model_config: ModelConfig,
    toy_vocab: Vocabulary,
    toy_samples: List[Sample],
):
    """A reloaded checkpoint predicts exactly as the saved model.

    Args:
        tmp_path (Path): pytest temporary directory
        tiny_model_config (ModelConfig): tiny model shape
        toy_vocab (Vocabulary): toy story vocabulary
        toy_samples (List[Sample]): hand-written samples
    """
    state = init_model(replace(tiny_model_config, vocab_size=len(toy_vocab), seed=3), toy_vocab)
    state.step = 7
    dataset = CheckpointDataset(filepath=str(tmp_path / "checkpoint.pt"))
    dataset.save(Checkpoint(state, "cafe"))
    loaded = input_dataset(tmp_path, "checkpoint").load()
    assert loaded.manifest_hash == "cafe"
    assert loaded.state.step == 7
    assert loaded.state.config == state.config
    ids = toy_vocab.encode(["<bos>", *toy_samples[0].context])
    assert torch.equal(loaded.state.distributions(ids), state.distributions(ids))


def test_run_catalog_paths(tmp_path: Path):
    """Every artifact of a run lives under its directory.

    Args:
        tmp_path (Path): pytest temporary directory
    """
    catalog = run_catalog(tmp_path)
    assert {"manifest", "splits", "vocab", "checkpoint", "report", "traces"} <= set(catalog.list())
    catalog.save("manifest", {"task": "toy_story"})
    assert (tmp_path / "manifest.yml").exists()
    with pytest.raises(KeyError):
        input_dataset(tmp_path, "stats")
