"""The files of a run directory, declared as a Kedro DataCatalog."""

from typing import Any, Dict, Union

from kedro.io import DataCatalog
from kedro_datasets.json import JSONDataset
from kedro_datasets.pandas import CSVDataset
from kedro_datasets.text import TextDataset
from kedro_datasets.yaml import YAMLDataset
from upath import UPath

from kedro_selfnotes.evalharness.report import report_dataset
from kedro_selfnotes.io.checkpoint_dataset import CheckpointDataset
from kedro_selfnotes.io.jsonl_dataset import JSONLinesDataset
from kedro_selfnotes.io.splits_dataset import SplitsDataset
from kedro_selfnotes.io.vocabulary_dataset import VocabularyDataset

MANIFEST = "manifest.yml"
ERROR_RECORD = "error.json"
LOCK = ".lock"


def run_datasets(out_dir: Union[str, UPath]) -> Dict[str, Any]:
    """Dataset per artifact name, every path under ``out_dir``."""
    out = UPath(out_dir)
    return {
        "manifest": YAMLDataset(filepath=str(out / MANIFEST), save_args={"sort_keys": True}),
        "error_record": JSONDataset(filepath=str(out / ERROR_RECORD), save_args={"indent": 2}),
        "splits": SplitsDataset(path=str(out)),
        "stats": JSONDataset(filepath=str(out / "stats.json"), save_args={"indent": 2, "sort_keys": True}),
        "vocab": VocabularyDataset(filepath=str(out / "vocab.txt")),
        "checkpoint": CheckpointDataset(filepath=str(out / "checkpoint.pt")),
        "train_curve": CSVDataset(filepath=str(out / "train_curve.csv"), save_args={"index": False}),
        "traces": JSONLinesDataset(filepath=str(out / "traces.jsonl")),
        "corpus": JSONLinesDataset(filepath=str(out / "corpus.jsonl"), record_type="enriched"),
        "report": report_dataset(out / "report.csv"),
        "report_table": TextDataset(filepath=str(out / "report.txt")),
    }


def run_catalog(out_dir: Union[str, UPath]) -> DataCatalog:
    """Catalog over a run directory.

    Example:
        >>> catalog = run_catalog("runs/toy")
        >>> sorted(catalog.list())[:3]
        ['checkpoint', 'corpus', 'error_record']
    """
    return DataCatalog(datasets=run_datasets(out_dir))


def input_dataset(path: Union[str, UPath], name: str) -> Any:
    """Dataset reading ``name`` from an existing run directory or file."""
    path = UPath(path)
    if name == "checkpoint":
        return CheckpointDataset(filepath=str(path if path.suffix == ".pt" else path / "checkpoint.pt"))
    if name == "splits":
        return SplitsDataset(path=str(path))
    if name == "vocab":
        return VocabularyDataset(filepath=str(path if path.suffix == ".txt" else path / "vocab.txt"))
    if name == "traces":
        return JSONLinesDataset(filepath=str(path))
    raise KeyError(name)
