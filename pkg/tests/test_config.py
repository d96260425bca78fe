"""Experiment configuration tests."""

from pathlib import Path

import pytest

from kedro_selfnotes.config import load_config
from kedro_selfnotes.errors import InvalidConfig

CONF = Path(__file__).parents[1] / "conf"


def test_file_then_overrides():
    """Dotted overrides win over the YAML file, which wins over defaults."""
    cfg = load_config(CONF / "smoke.yml", ["train.epochs=2", "decode.max_note_len=5"])
    assert cfg.task == "toy_story"
    assert cfg.gen.count == 8
    assert cfg.train.epochs == 2
    assert cfg.decode.max_note_len == 5
    assert cfg.model.pos_offset_range == (0, 8)


def test_keyword_values_before_overrides():
    """Keyword values sit between the file and the overrides."""
    cfg = load_config(None, ["seed=4"], seed=3, task="boolean_var")
    assert (cfg.task, cfg.seed) == ("boolean_var", 4)


@pytest.mark.parametrize(
    "override",
    [
        "task=sudoku",
        "train.epochs=0",
        "model.model_width=130",
        "regime.p=1.5",
        "eval.method=beam",
        "eval.replicates=0",
        "ablation.mode=shuffle",
        "train.epochs=many",
    ],
)
def test_invalid_values(override: str):
    """Unknown names and out-of-range values are rejected as one error type.

    Args:
        override (str): offending dotted override
    """
    with pytest.raises(InvalidConfig):
        load_config(overrides=["model.num_heads=4", override])


def test_eval_method_follows_regime():
    """Without an explicit method, evaluation decodes the way training framed."""
    assert load_config(overrides=["regime.method=scratchpad"]).eval_method == "scratchpad"
    assert load_config(overrides=["eval.method=vanilla"]).eval_method == "vanilla"


def test_manifest_hash():
    """Equal resolved configs hash equally, any change shows."""
    a = load_config(CONF / "smoke.yml")
    b = load_config(CONF / "smoke.yml")
    c = load_config(CONF / "smoke.yml", ["seed=1"])
    assert a.manifest_hash == b.manifest_hash
    assert a.manifest_hash != c.manifest_hash
    assert a.to_dict()["model"]["pos_offset_range"] == [0, 8]
