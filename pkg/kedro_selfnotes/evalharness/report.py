"""Report tables: mean and std over seed replicates, as CSV and aligned text."""

import logging
import math
from typing import Iterable, Tuple, Union

import pandas as pd
from kedro_datasets.pandas import CSVDataset
from kedro_datasets.text import TextDataset
from upath import UPath

from kedro_selfnotes.evalharness.evaluate import EvalReport

logger = logging.getLogger(__name__)

KEYS = ["task", "bucket", "method"]
REPORT_COLUMNS = [
    "task",
    "bucket",
    "method",
    "n",
    "accuracy",
    "std",
    "overflow_rate",
    "mean_note_tokens",
    "manifest_hash",
]
_NUMERIC = ["accuracy", "std", "overflow_rate", "mean_note_tokens"]


def report_frame(reports: Iterable[EvalReport]) -> pd.DataFrame:
    """Replicates of a (task, bucket, method) merged into one row.

    ``std`` is the sample standard deviation of the accuracy and stays empty
    for a single run.

    Example:
        >>> from kedro_selfnotes.evalharness.evaluate import BucketResult
        >>> runs = [EvalReport("toy_story", "selfnotes", [BucketResult("3*", 10, c)], seed=s)
        ...         for s, c in enumerate([8, 9, 10])]
        >>> row = report_frame(runs).iloc[0]
        >>> print(f"{row['accuracy']:.2f} {row['std']:.2f}")
        0.90 0.10
    """
    frames = [report.to_frame() for report in reports]
    assert frames, "at least one report is needed"
    frame = pd.concat(frames, ignore_index=True)
    merged = frame.groupby(KEYS, sort=False).agg(
        n=("n", "first"),
        accuracy=("accuracy", "mean"),
        std=("accuracy", "std"),
        overflow_rate=("overflow_rate", "mean"),
        mean_note_tokens=("mean_note_tokens", "mean"),
        manifest_hash=("manifest_hash", "first"),
    )
    return merged.reset_index()[REPORT_COLUMNS]


def _cell(mean: float, std: float) -> str:
    if mean is None or math.isnan(mean):
        return "-"
    if std is None or math.isnan(std):
        return f"{100 * mean:.1f}"
    return f"{100 * mean:.1f} ± {100 * std:.1f}"


def render_table(frame: pd.DataFrame) -> str:
    """Aligned text table with accuracy in percent."""
    table = frame[KEYS + ["n"]].copy()
    table["accuracy (%)"] = [_cell(m, s) for m, s in zip(frame["accuracy"], frame["std"])]
    table["overflow"] = frame["overflow_rate"].map(lambda v: "-" if pd.isna(v) else f"{v:.2f}")
    table["note tokens"] = frame["mean_note_tokens"].map(lambda v: "-" if pd.isna(v) else f"{v:.1f}")
    return table.to_string(index=False) + "\n"


def report_dataset(path: Union[str, UPath]) -> CSVDataset:
    """CSV dataset of a report frame, empty cells read back as NaN."""
    return CSVDataset(
        filepath=str(path),
        load_args={
            "dtype": {"task": str, "bucket": str, "method": str, "manifest_hash": str},
            "keep_default_na": False,
            "na_values": {column: [""] for column in _NUMERIC},
        },
        save_args={"index": False},
    )


def emit_report(
    reports: Iterable[EvalReport], out_dir: Union[str, UPath], name: str = "report"
) -> Tuple[UPath, UPath]:
    """Write ``<name>.csv`` and ``<name>.txt`` into ``out_dir``."""
    frame = report_frame(reports)
    out = UPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, text_path = out / f"{name}.csv", out / f"{name}.txt"
    report_dataset(csv_path).save(frame)
    TextDataset(filepath=str(text_path)).save(render_table(frame))
    logger.info(f"Wrote report of {len(frame)} rows to {csv_path}")
    return csv_path, text_path


def load_report(path: Union[str, UPath]) -> pd.DataFrame:
    return report_dataset(path).load()
