"""A Dataset of JSON lines, optionally decoded into workbench records."""

import json
from copy import deepcopy
from pathlib import PurePosixPath
from typing import Any, Callable, Dict, List, Optional

import fsspec
from kedro.io.core import AbstractDataset, DatasetError, get_filepath_str, get_protocol_and_path

from kedro_selfnotes.corpus.sample import Sample


def _record_types() -> Dict[str, Callable[[Dict[str, Any]], Any]]:
    from kedro_selfnotes.paradigms.unsupervised import EnrichedSample

    return {"sample": Sample.from_dict, "enriched": EnrichedSample.from_dict}


class JSONLinesDataset(AbstractDataset[List[Any], List[Any]]):
    """One JSON object per line, in list order.

    Items with a ``to_dict`` method are converted on save; ``record_type``
    (``sample`` or ``enriched``) converts lines back on load.

    Example:
        >>> import tempfile, os
        >>> path = os.path.join(tempfile.mkdtemp(), "rows.jsonl")
        >>> ds = JSONLinesDataset(filepath=path)
        >>> ds.save([{"a": 1}, {"a": 2}])
        >>> ds.load()
        [{'a': 1}, {'a': 2}]
    """

    DEFAULT_FS_ARGS: Dict[str, Any] = {"open_args_save": {"mode": "w", "encoding": "utf-8"}}

    def __init__(
        self,
        filepath: str,
        record_type: Optional[str] = None,
        credentials: Optional[Dict[str, Any]] = None,
        fs_args: Optional[Dict[str, Any]] = None,
    ):
        if record_type is not None and record_type not in ("sample", "enriched"):
            raise DatasetError(f"unknown record_type {record_type!r}")
        self._record_type = record_type
        fs_args = deepcopy(fs_args or {})
        self._fs_open_args_load = fs_args.pop("open_args_load", {"mode": "r", "encoding": "utf-8"})
        self._fs_open_args_save = fs_args.pop(
            "open_args_save", self.DEFAULT_FS_ARGS["open_args_save"]
        )
        protocol, path = get_protocol_and_path(filepath)
        self._protocol = protocol
        self._fs = fsspec.filesystem(protocol, **deepcopy(credentials or {}), **fs_args)
        self._filepath = PurePosixPath(path)

    def _describe(self) -> Dict[str, Any]:
        return {"filepath": str(self._filepath), "record_type": self._record_type}

    def _load(self) -> List[Any]:
        path = get_filepath_str(self._filepath, self._protocol)
        with self._fs.open(path, **self._fs_open_args_load) as handle:
            records = [json.loads(line) for line in handle if line.strip()]
        if self._record_type is None:
            return records
        convert = _record_types()[self._record_type]
        return [convert(record) for record in records]

    def _save(self, data: List[Any]):
        path = get_filepath_str(self._filepath, self._protocol)
        parent = str(PurePosixPath(path).parent)
        self._fs.mkdirs(parent, exist_ok=True)
        with self._fs.open(path, **self._fs_open_args_save) as handle:
            for item in data:
                record = item.to_dict() if hasattr(item, "to_dict") else item
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _exists(self) -> bool:
        return self._fs.exists(get_filepath_str(self._filepath, self._protocol))
