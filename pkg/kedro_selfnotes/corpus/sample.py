"""Task samples and their gold note annotations."""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Sequence, Tuple

from typing_extensions import Literal

from kedro_selfnotes.utils.typing import TokenLike, Tokens

TaskId = Literal["toy_story", "algorithmic", "boolean_var", "chess_piece", "chess_move"]
TASKS: Tuple[str, ...] = (
    "toy_story",
    "algorithmic",
    "boolean_var",
    "chess_piece",
    "chess_move",
)

BOS = "<bos>"
EOS = "<eos>"
PAD = "<pad>"
SEMI_PREFIX = "<s>"
DUMMY = "_"
OPEN_BRACKET = "["
CLOSE_BRACKET = "]"
SPECIAL_TOKENS: Tuple[str, ...] = (
    PAD,
    BOS,
    EOS,
    SEMI_PREFIX,
    DUMMY,
    OPEN_BRACKET,
    CLOSE_BRACKET,
)
"""Tokens every task vocabulary starts with, in id order."""

META_KEYS: Dict[str, str] = {
    "toy_story": "hops",
    "algorithmic": "statements",
    "boolean_var": "statements",
    "chess_piece": "moves",
    "chess_move": "moves",
}
"""Difficulty key stored in ``Sample.meta`` for each task."""


def check_task(task: str) -> str:
    """Return ``task`` if known.

    Example:
        >>> check_task("algorithmic")
        'algorithmic'
    """
    assert task in TASKS, f"unknown task {task!r}, expected one of {TASKS}"
    return task


@dataclass(frozen=True)
class NoteAnnotation:
    """A note inserted after ``pos`` context tokens."""

    pos: int
    tokens: Tokens

    def to_dict(self) -> Dict[str, Any]:
        return {"pos": self.pos, "tokens": list(self.tokens)}

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "NoteAnnotation":
        return cls(pos=int(record["pos"]), tokens=tuple(record["tokens"]))


@dataclass(frozen=True)
class Sample:
    """One task instance: context, question, answer and gold notes.

    Notes are ordered by position; several notes may share a position, in
    which case they follow each other in list order.
    """

    task: str
    context: Tokens
    question: Tokens
    answer: Tokens
    notes: Tuple[NoteAnnotation, ...] = ()
    meta: Dict[str, int] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        check_task(self.task)
        assert len(self.answer) > 0, "answer must not be empty"
        positions = [note.pos for note in self.notes]
        assert positions == sorted(positions), f"unordered notes {positions}"
        assert all(
            0 <= pos <= len(self.context) for pos in positions
        ), f"note position outside context of length {len(self.context)}"

    @property
    def difficulty(self) -> int:
        """Value of the task's difficulty key (hops, statements or moves)."""
        return int(self.meta[META_KEYS[self.task]])

    def enriched_context(self) -> List[str]:
        """Context with every gold note spliced in."""
        return splice_notes(self.context, self.notes)

    def note_token_count(self) -> int:
        return sum(len(note.tokens) for note in self.notes)

    def without_notes(self) -> "Sample":
        return replace(self, notes=())

    def to_dict(self) -> Dict[str, Any]:
        """JSON record with the exact dataset field names."""
        return {
            "task": self.task,
            "context": list(self.context),
            "question": list(self.question),
            "answer": list(self.answer),
            "notes": [note.to_dict() for note in self.notes],
            "meta": dict(self.meta),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "Sample":
        return cls(
            task=record["task"],
            context=tuple(record["context"]),
            question=tuple(record["question"]),
            answer=tuple(record["answer"]),
            notes=tuple(NoteAnnotation.from_dict(note) for note in record["notes"]),
            meta=dict(record["meta"]),
            seed=int(record["seed"]),
        )


def splice_notes(context: TokenLike, notes: Sequence[NoteAnnotation]) -> List[str]:
    """Insert each note after ``note.pos`` context tokens.

    Example:
        >>> notes = [NoteAnnotation(1, ("n1",)), NoteAnnotation(1, ("n2",)),
        ...          NoteAnnotation(3, ("n3",))]
        >>> splice_notes(["x1", "x2", "x3"], notes)
        ['x1', 'n1', 'n2', 'x2', 'x3', 'n3']
    """
    spliced: List[str] = []
    cursor = 0
    for note in notes:
        spliced.extend(context[cursor : note.pos])
        cursor = max(cursor, note.pos)
        spliced.extend(note.tokens)
    spliced.extend(context[cursor:])
    return spliced


def note_positions(notes: Sequence[NoteAnnotation]) -> List[int]:
    """Distinct positions carrying at least one note, ascending."""
    return sorted({note.pos for note in notes})
