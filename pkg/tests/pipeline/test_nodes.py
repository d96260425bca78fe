"""Pipeline wiring tests with in-memory catalogs."""

from pathlib import Path

from kedro.io import DataCatalog, MemoryDataset

from kedro_selfnotes.config import load_config
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.io.splits_dataset import SplitsDataset
from kedro_selfnotes.pipeline import create_pipelines, gen_pipeline, run_pipeline, train_pipeline
from kedro_selfnotes.pipeline.nodes import _replicate, resolve_manifest

OVERRIDES = [
    "task=toy_story",
    "gen.count=6",
    "model.num_layers=1",
    "model.num_heads=2",
    "model.model_width=16",
    "model.ffn_width=32",
    "model.max_positions=256",
    "model.pos_offset_range=[0,8]",
    "train.epochs=1",
]


def test_gen_then_train(tmp_path: Path):
    """Generated splits feed training; only the splits touch the filesystem.

    Args:
        tmp_path (Path): pytest temporary directory
    """
    cfg = load_config(overrides=OVERRIDES)
    catalog = DataCatalog(
        {"config": MemoryDataset(cfg, copy_mode="assign"), "splits": SplitsDataset(path=str(tmp_path))}
    )
    outputs = run_pipeline(gen_pipeline(), catalog, {"command": "gen"})
    splits, vocab = catalog.load("splits"), outputs["vocab"]
    assert {name: len(rows) for name, rows in splits.items()} == {"train": 6, "valid": 6, "test": 6}
    assert isinstance(vocab, Vocabulary)
    assert outputs["stats"]["splits"]["train"]["count"] == 6

    catalog = DataCatalog(
        {
            "config": MemoryDataset(cfg, copy_mode="assign"),
            "splits": MemoryDataset(splits, copy_mode="assign"),
            "vocab": MemoryDataset(vocab, copy_mode="assign"),
        }
    )
    trained = run_pipeline(train_pipeline(), catalog, {"command": "train"})
    assert trained["checkpoint"].manifest_hash == cfg.manifest_hash
    assert trained["checkpoint"].state.step >= 1
    assert list(trained["train_curve"]["epoch"]) == [1] * len(trained["train_curve"])


def test_replicates_shift_seeds():
    """The k-th replicate moves every training seed by k."""
    cfg = load_config(overrides=["seed=5"])
    assert _replicate(cfg, 0) is cfg
    second = _replicate(cfg, 2)
    assert (second.model.seed, second.train.seed, second.regime.seed) == (2, 2, 2)
    assert second.seed == 5


def test_manifest_is_resolved_config():
    """The manifest node returns the plain resolved mapping."""
    cfg = load_config(overrides=["task=boolean_var"])
    assert resolve_manifest(cfg) == cfg.to_dict()


def test_registry():
    """Every command has a pipeline that also writes the manifest."""
    pipelines = create_pipelines()
    assert set(pipelines) == {"gen", "train", "eval", "ablate", "ladder", "__default__"}
    assert all("manifest" in p.all_outputs() for p in pipelines.values())
