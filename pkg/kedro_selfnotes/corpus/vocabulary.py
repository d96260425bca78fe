"""Closed per-task vocabularies with the note start/end token sets."""

from typing import Any, Dict, FrozenSet, Iterable, List, Sequence, Tuple

from kedro_selfnotes.corpus.sample import (
    BOS,
    DUMMY,
    EOS,
    PAD,
    SEMI_PREFIX,
    SPECIAL_TOKENS,
    Sample,
    check_task,
)
from kedro_selfnotes.errors import InvalidConfig

PIECE_LETTERS: Tuple[str, ...] = ("P", "N", "B", "R", "Q", "K")
SQUARES: Tuple[str, ...] = tuple(f"{file}{rank}" for file in "abcdefgh" for rank in "12345678")

NOTE_TOKENS: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    "toy_story": (("SQ:",), (".",)),
    "algorithmic": (("print",), (";",)),
    "boolean_var": (("print",), (";",)),
    "chess_piece": (PIECE_LETTERS, PIECE_LETTERS),
    "chess_move": (PIECE_LETTERS, PIECE_LETTERS),
}
"""Default note start and end tokens per task."""

TASK_TOKENS: Dict[str, Tuple[str, ...]] = {
    "toy_story": ("Q:", "SQ:", "Where", "Who", "is", "has", "at", "with", "inside", "the", "?", "."),
    "algorithmic": ("print", "if", "<", ">", ":", "=", "++", "--", ";"),
    "boolean_var": ("print", "=", "and", "or", "xor", "not", "True", "False", ";"),
    "chess_piece": PIECE_LETTERS + ("PIECE",) + SQUARES,
    "chess_move": PIECE_LETTERS + ("MOVE",) + SQUARES,
}
"""Grammar tokens present in a task vocabulary even if no sample uses them."""


class Vocabulary:
    """Token to id mapping plus the special token sets.

    Example:
        >>> vocab = Vocabulary(["<pad>", "<bos>", "<eos>", "print", ";", "x"],
        ...                    note_start=["print"], note_end=[";"])
        >>> vocab.encode(["print", "x"])
        [3, 5]
        >>> vocab.decode([4])
        [';']
        >>> sorted(vocab.start_ids)
        [3]
    """

    def __init__(
        self,
        tokens: Sequence[str],
        note_start: Iterable[str],
        note_end: Iterable[str],
        semi_prefix: str = SEMI_PREFIX,
        dummy: str = DUMMY,
    ):
        self.tokens: List[str] = list(tokens)
        if len(set(self.tokens)) != len(self.tokens):
            raise InvalidConfig("duplicate tokens in the vocabulary")
        self._index: Dict[str, int] = {tok: i for i, tok in enumerate(self.tokens)}
        self.note_start: Tuple[str, ...] = tuple(note_start)
        self.note_end: Tuple[str, ...] = tuple(note_end)
        self.semi_prefix = semi_prefix
        self.dummy = dummy
        missing = [
            tok for tok in (*self.note_start, *self.note_end, PAD, BOS, EOS) if tok not in self
        ]
        if missing:
            raise InvalidConfig(f"vocabulary lacks required tokens {missing}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return f"Vocabulary(size={len(self)}, note_start={list(self.note_start)})"

    def id(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise KeyError(f"token {token!r} is not in the vocabulary") from None

    def encode(self, tokens: Iterable[str]) -> List[int]:
        return [self.id(token) for token in tokens]

    def decode(self, ids: Iterable[int]) -> List[str]:
        return [self.tokens[i] for i in ids]

    @property
    def pad_id(self) -> int:
        return self._index[PAD]

    @property
    def bos_id(self) -> int:
        return self._index[BOS]

    @property
    def eos_id(self) -> int:
        return self._index[EOS]

    @property
    def start_ids(self) -> FrozenSet[int]:
        return frozenset(self.id(tok) for tok in self.note_start)

    @property
    def end_ids(self) -> FrozenSet[int]:
        return frozenset(self.id(tok) for tok in self.note_end)

    def with_note_tokens(
        self, note_start: Iterable[str], note_end: Iterable[str]
    ) -> "Vocabulary":
        """Same ids, different note start and end tokens."""
        return Vocabulary(self.tokens, note_start, note_end, self.semi_prefix, self.dummy)

    def sidecar(self) -> Dict[str, Any]:
        """Special sections stored next to the token file."""
        return {
            "note_start": list(self.note_start),
            "note_end": list(self.note_end),
            "semi_prefix": self.semi_prefix,
            "dummy": self.dummy,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {"tokens": list(self.tokens), **self.sidecar()}

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "Vocabulary":
        return cls(
            record["tokens"],
            record["note_start"],
            record["note_end"],
            record.get("semi_prefix", SEMI_PREFIX),
            record.get("dummy", DUMMY),
        )

    @classmethod
    def build(cls, task: str, samples: Iterable[Sample]) -> "Vocabulary":
        """Specials first, then every task and sample token in sorted order.

        Example:
            >>> vocab = Vocabulary.build("boolean_var", [])
            >>> vocab.tokens[:3]
            ['<pad>', '<bos>', '<eos>']
            >>> vocab.note_start
            ('print',)
        """
        check_task(task)
        seen = set(TASK_TOKENS[task])
        for sample in samples:
            seen.update(sample.context)
            seen.update(sample.question)
            seen.update(sample.answer)
            for note in sample.notes:
                seen.update(note.tokens)
        seen.difference_update(SPECIAL_TOKENS)
        start, end = NOTE_TOKENS[task]
        return cls(list(SPECIAL_TOKENS) + sorted(seen), start, end)
