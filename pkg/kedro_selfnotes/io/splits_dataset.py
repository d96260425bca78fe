"""The train/valid/test JSONL files of a generated corpus as one Dataset."""

from concurrent.futures import ThreadPoolExecutor
from copy import deepcopy
from pathlib import PurePosixPath
from typing import Any, Dict, List, Optional, Tuple

from kedro_datasets.json import JSONDataset
from kedro_datasets.partitions import PartitionedDataset

from kedro_selfnotes.corpus.generate import split_stats
from kedro_selfnotes.utils.constants import MAX_WORKERS

SPLITS = ("train", "valid", "test")
STATS_SUFFIX = ".stats.json"


class SplitsDataset(PartitionedDataset):
    """Partitioned JSONL splits saved in threads and loaded eagerly.

    Every saved split of samples gets a ``<split>.stats.json`` sidecar with
    its difficulty histogram and note density. Only the ``train``, ``valid``
    and ``test`` partitions are loaded; other files of the directory are left
    alone.

    Example:
        >>> import tempfile
        >>> from kedro_selfnotes.corpus.programs import make_program_sample
        >>> s = make_program_sample("algorithmic", "x = 7 ;".split(), "x")
        >>> ds = SplitsDataset(path=tempfile.mkdtemp())
        >>> ds.save({"train": [s], "test": [s, s]})
        >>> {name: len(rows) for name, rows in sorted(ds.load().items())}
        {'test': 2, 'train': 1}
        >>> ds.load_stats()["test"]["count"]
        2
    """

    def __init__(
        self,
        path: str,
        record_type: Optional[str] = "sample",
        overwrite: bool = False,
        credentials: Optional[Dict[str, Any]] = None,
        fs_args: Optional[Dict[str, Any]] = None,
    ):
        dataset: Dict[str, Any] = {"type": "kedro_selfnotes.io.jsonl_dataset.JSONLinesDataset"}
        if record_type is not None:
            dataset["record_type"] = record_type
        self._record_type = record_type
        super().__init__(
            path=path,
            dataset=dataset,
            filename_suffix=".jsonl",
            credentials=credentials,
            fs_args=fs_args,
            overwrite=overwrite,
        )

    def _stats_dataset(self, split: str) -> JSONDataset:
        path = PurePosixPath(self._partition_to_path(split)).with_suffix(STATS_SUFFIX)
        return JSONDataset(
            filepath=self._join_protocol(str(path)),
            credentials=deepcopy(self._credentials) or None,
        )

    def _save_split(self, split: Tuple[str, Any]):
        """Write one split and, for samples, its statistics sidecar.

        Args:
            split (Tuple[str, Any]): split name and its rows, or a callable
                producing them
        """
        name, rows = split
        if callable(rows):
            rows = rows()
        kwargs = deepcopy(self._dataset_config)
        kwargs[self._filepath_arg] = self._join_protocol(self._partition_to_path(name))
        self._dataset_type(**kwargs).save(rows)  # type: ignore
        if self._record_type != "sample":
            self._logger.info(f"Saved split {name} with {len(rows)} records")
            return
        stats = split_stats(rows)
        self._stats_dataset(name).save(stats)
        self._logger.info(
            f"Saved split {name} with {stats['count']} samples, "
            f"difficulties {stats['difficulty_histogram']}"
        )

    def _save(self, data: Dict[str, Any]):
        if self._overwrite and self._filesystem.exists(self._normalized_path):
            self._filesystem.rm(self._normalized_path, recursive=True)
        with ThreadPoolExecutor(max_workers=MAX_WORKERS) as pool:
            list(pool.map(self._save_split, data.items()))
        self._invalidate_caches()

    def _load(self) -> Dict[str, List[Any]]:
        partitions = super()._load()
        return {name: partitions[name]() for name in SPLITS if name in partitions}

    def load_stats(self) -> Dict[str, Dict[str, Any]]:
        """Statistics sidecars of the saved splits.

        Returns:
            Dict[str, Dict[str, Any]]: split name to its statistics, for the
            splits that have a sidecar
        """
        sidecars = {name: self._stats_dataset(name) for name in SPLITS}
        return {name: ds.load() for name, ds in sidecars.items() if ds.exists()}
