"""Command-line surface tests over the smoke configuration."""

import json
from pathlib import Path

import pandas as pd
import pytest
import yaml
from click.testing import CliRunner
from pytest_mock import MockFixture

from kedro_selfnotes.cli import cli
from kedro_selfnotes.errors import RunLocked

SMOKE = str(Path(__file__).parents[1] / "conf" / "smoke.yml")


@pytest.fixture(scope="module")
def runs(tmp_path_factory) -> Path:
    """Generated data and one trained checkpoint, shared by the module.

    Args:
        tmp_path_factory: pytest temporary directory factory

    Returns:
        Path: directory holding ``data`` and ``model``
    """
    root = tmp_path_factory.mktemp("runs")
    runner = CliRunner()
    gen = runner.invoke(cli, ["gen", "--config", SMOKE, "--out", str(root / "data")])
    assert gen.exit_code == 0, gen.output
    train = runner.invoke(
        cli, ["train", "--data", str(root / "data"), "--out", str(root / "model"), "train.epochs=1"]
    )
    assert train.exit_code == 0, train.output
    return root


def test_gen_writes_splits_and_manifest(runs: Path):
    """Splits, sidecars and the manifest land in the output directory.

    Args:
        runs (Path): shared run directories
    """
    data = runs / "data"
    for name in ("train.jsonl", "valid.jsonl", "test.jsonl", "stats.json", "vocab.txt", "manifest.yml"):
        assert (data / name).exists(), name
    assert len((data / "test.jsonl").read_text().splitlines()) == 8
    manifest = yaml.safe_load((data / "manifest.yml").read_text())
    assert manifest["gen"]["count"] == 8
    assert not (data / ".lock").exists()


def test_train_inherits_manifest(runs: Path):
    """Training without ``--config`` resolves from the data manifest.

    Args:
        runs (Path): shared run directories
    """
    model = runs / "model"
    assert (model / "checkpoint.pt").exists()
    manifest = yaml.safe_load((model / "manifest.yml").read_text())
    assert manifest["model"]["model_width"] == 16
    curve = pd.read_csv(model / "train_curve.csv")
    assert len(curve) >= 1


def test_eval_and_inspect(runs: Path):
    """Evaluation writes a report and traces that inspect can render.

    Args:
        runs (Path): shared run directories
    """
    runner = CliRunner()
    out = runs / "eval"
    result = runner.invoke(
        cli,
        ["eval", "--ckpt", str(runs / "model"), "--data", str(runs / "data"), "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert (out / "report.csv").exists()
    assert "accuracy (%)" in (out / "report.txt").read_text()
    assert len((out / "traces.jsonl").read_text().splitlines()) == 8
    shown = runner.invoke(cli, ["inspect", "--trace", str(out / "traces.jsonl"), "--id", "0"])
    assert shown.exit_code == 0, shown.output
    assert shown.output.startswith("sample 0 (selfnotes)")
    missing = runner.invoke(cli, ["inspect", "--trace", str(out / "traces.jsonl"), "--id", "99"])
    assert missing.exit_code == 1


def test_missing_checkpoint_exits_with_record(runs: Path, tmp_path: Path):
    """A missing input fails with status 1 and an error record.

    Args:
        runs (Path): shared run directories
        tmp_path (Path): pytest temporary directory
    """
    result = CliRunner().invoke(
        cli,
        ["eval", "--ckpt", str(tmp_path / "nope.pt"), "--data", str(runs / "data"), "--out", str(tmp_path / "e")],
    )
    assert result.exit_code == 1
    record = json.loads((tmp_path / "e" / "error.json").read_text())
    assert record["command"] == "eval"
    assert record["error_type"] == "FileNotFoundError"


def test_bad_override_exits(runs: Path, tmp_path: Path):
    """Unknown configuration keys are reported as invalid.

    Args:
        runs (Path): shared run directories
        tmp_path (Path): pytest temporary directory
    """
    result = CliRunner().invoke(
        cli, ["gen", "--config", SMOKE, "--out", str(tmp_path), "gen.cont=3"]
    )
    assert result.exit_code == 1
    assert json.loads((tmp_path / "error.json").read_text())["error_type"] == "InvalidConfig"


def test_locked_run_keeps_error_record(tmp_path: Path, mocker: MockFixture):
    """A refused run leaves the directory of the run holding the lock untouched.

    Args:
        tmp_path (Path): pytest temporary directory
        mocker (MockFixture): pytest-mock fixture
    """
    mocker.patch("kedro_selfnotes.cli.run_pipeline", side_effect=RunLocked("held"))
    result = CliRunner().invoke(cli, ["gen", "--config", SMOKE, "--out", str(tmp_path)])
    assert result.exit_code == 1
    assert "RunLocked" in result.output
    assert not (tmp_path / "error.json").exists()
