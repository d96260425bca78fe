"""Run guard hook tests."""

import json
from pathlib import Path

import pytest
from kedro.io import DataCatalog, MemoryDataset
from kedro.pipeline import Pipeline, node

from kedro_selfnotes.errors import RunLocked
from kedro_selfnotes.pipeline import run_pipeline
from kedro_selfnotes.plugin import RunGuardHook


def _double(x: int) -> int:
    return 2 * x


def _fail(x: int) -> int:
    raise FileNotFoundError(f"no checkpoint {x}")


@pytest.fixture
def catalog() -> DataCatalog:
    """Catalog with one in-memory input.

    Returns:
        DataCatalog: catalog holding ``x``
    """
    return DataCatalog({"x": MemoryDataset(21)})


def test_lock_is_exclusive(tmp_path: Path, catalog: DataCatalog):
    """A second run on the same directory is refused until the first ends.

    Args:
        tmp_path (Path): pytest temporary directory
        catalog (DataCatalog): catalog fixture
    """
    params = {"out_dir": str(tmp_path), "command": "gen"}
    first, second = RunGuardHook(), RunGuardHook()
    first.before_pipeline_run(params, Pipeline([]), catalog)
    assert (tmp_path / ".lock").exists()
    with pytest.raises(RunLocked):
        second.before_pipeline_run(params, Pipeline([]), catalog)
    first.after_pipeline_run(params, {}, Pipeline([]), catalog)
    second.before_pipeline_run(params, Pipeline([]), catalog)
    second.after_pipeline_run(params, {}, Pipeline([]), catalog)
    assert not (tmp_path / ".lock").exists()


def test_successful_run_releases_lock(tmp_path: Path, catalog: DataCatalog):
    """Free outputs come back and the lock is gone.

    Args:
        tmp_path (Path): pytest temporary directory
        catalog (DataCatalog): catalog fixture
    """
    pipeline = Pipeline([node(_double, "x", "y")])
    result = run_pipeline(pipeline, catalog, {"out_dir": str(tmp_path), "command": "gen"})
    assert result["y"] == 42
    assert not (tmp_path / ".lock").exists()


def test_failed_run_writes_error_record(tmp_path: Path, catalog: DataCatalog):
    """The error is re-raised after ``error.json`` is written.

    Args:
        tmp_path (Path): pytest temporary directory
        catalog (DataCatalog): catalog fixture
    """
    pipeline = Pipeline([node(_fail, "x", "y")])
    with pytest.raises(Exception, match="no checkpoint 21"):
        run_pipeline(pipeline, catalog, {"out_dir": str(tmp_path), "command": "eval"})
    record = json.loads((tmp_path / "error.json").read_text())
    assert record["command"] == "eval"
    assert record["error_type"] == "FileNotFoundError"
    assert not (tmp_path / ".lock").exists()


def test_no_out_dir_is_left_alone(tmp_path: Path, catalog: DataCatalog, monkeypatch):
    """Plain sessions neither lock nor record.

    Args:
        tmp_path (Path): pytest temporary directory
        catalog (DataCatalog): catalog fixture
        monkeypatch: pytest monkeypatch fixture
    """
    monkeypatch.chdir(tmp_path)
    with pytest.raises(Exception):
        run_pipeline(Pipeline([node(_fail, "x", "y")]), catalog, {})
    assert list(tmp_path.iterdir()) == []
