"""Vocabulary as a token-per-line file with a YAML sidecar of the special sets."""

from pathlib import PurePosixPath
from typing import Any, Dict, Optional

from kedro.io.core import AbstractDataset
from kedro_datasets.text import TextDataset
from kedro_datasets.yaml import YAMLDataset

from kedro_selfnotes.corpus.vocabulary import Vocabulary


class VocabularyDataset(AbstractDataset[Vocabulary, Vocabulary]):
    """``vocab.txt`` holds one token per line in id order, ``vocab.yml`` the sidecar.

    Example:
        >>> import tempfile, os
        >>> vocab = Vocabulary.build("boolean_var", [])
        >>> ds = VocabularyDataset(filepath=os.path.join(tempfile.mkdtemp(), "vocab.txt"))
        >>> ds.save(vocab)
        >>> ds.load() == vocab
        True
    """

    def __init__(self, filepath: str, sidecar_filepath: Optional[str] = None):
        self._filepath = PurePosixPath(filepath)
        sidecar = sidecar_filepath or str(self._filepath.with_suffix(".yml"))
        self._tokens = TextDataset(filepath=str(self._filepath))
        self._sidecar = YAMLDataset(filepath=sidecar)

    def _describe(self) -> Dict[str, Any]:
        return {"filepath": str(self._filepath), "sidecar": self._sidecar._describe()}

    def _load(self) -> Vocabulary:
        tokens = self._tokens.load().splitlines()
        return Vocabulary.from_dict({"tokens": tokens, **self._sidecar.load()})

    def _save(self, data: Vocabulary):
        self._tokens.save("\n".join(data.tokens) + "\n")
        self._sidecar.save(data.sidecar())

    def _exists(self) -> bool:
        return self._tokens.exists() and self._sidecar.exists()
