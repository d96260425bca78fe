"""Model checkpoints: parameters, config, vocabulary and manifest hash in one file."""

from copy import deepcopy
from dataclasses import asdict, dataclass
from pathlib import PurePosixPath
from typing import Any, Dict, Optional

import fsspec
import torch
from kedro.io.core import AbstractDataset, DatasetError, get_filepath_str, get_protocol_and_path

from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.textmodel.config import ModelConfig
from kedro_selfnotes.textmodel.transformer import ModelState, init_model

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    state: ModelState
    manifest_hash: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": FORMAT_VERSION,
            "config": asdict(self.state.config),
            "step": self.state.step,
            "parameters": self.state.module.state_dict(),
            "vocab": self.state.vocab.to_dict(),
            "manifest_hash": self.manifest_hash,
        }

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "Checkpoint":
        if record.get("version") != FORMAT_VERSION:
            raise DatasetError(f"unsupported checkpoint version {record.get('version')!r}")
        config = dict(record["config"])
        config["pos_offset_range"] = tuple(config["pos_offset_range"])
        state = init_model(ModelConfig(**config), Vocabulary.from_dict(record["vocab"]))
        state.module.load_state_dict(record["parameters"])
        state.module.eval()
        state.step = int(record["step"])
        return cls(state, record.get("manifest_hash", ""))


class CheckpointDataset(AbstractDataset[Checkpoint, Checkpoint]):
    """Saves a :class:`Checkpoint` with ``torch.save``."""

    def __init__(
        self,
        filepath: str,
        credentials: Optional[Dict[str, Any]] = None,
        fs_args: Optional[Dict[str, Any]] = None,
    ):
        protocol, path = get_protocol_and_path(filepath)
        self._protocol = protocol
        self._fs = fsspec.filesystem(protocol, **deepcopy(credentials or {}), **(fs_args or {}))
        self._filepath = PurePosixPath(path)

    def _describe(self) -> Dict[str, Any]:
        return {"filepath": str(self._filepath)}

    def _load(self) -> Checkpoint:
        path = get_filepath_str(self._filepath, self._protocol)
        with self._fs.open(path, mode="rb") as handle:
            record = torch.load(handle, map_location="cpu", weights_only=False)
        checkpoint = Checkpoint.from_dict(record)
        self._logger.info(f"Loaded checkpoint at step {checkpoint.state.step} from {path}")
        return checkpoint

    def _save(self, data: Checkpoint):
        path = get_filepath_str(self._filepath, self._protocol)
        self._fs.mkdirs(str(PurePosixPath(path).parent), exist_ok=True)
        with self._fs.open(path, mode="wb") as handle:
            torch.save(data.to_dict(), handle)

    def _exists(self) -> bool:
        return self._fs.exists(get_filepath_str(self._filepath, self._protocol))
