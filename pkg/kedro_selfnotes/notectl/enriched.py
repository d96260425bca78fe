"""Contexts with note spans interleaved."""

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

from kedro_selfnotes.corpus.sample import NoteAnnotation
from kedro_selfnotes.utils.typing import TokenLike, Tokens

CONTEXT = "context"
GOLD = "gold"
GENERATED = "generated"
ORIGINS = (CONTEXT, GOLD, GENERATED)


@dataclass(frozen=True)
class Segment:
    origin: str
    tokens: Tokens

    @property
    def is_note(self) -> bool:
        return self.origin != CONTEXT


class EnrichedContext:
    """Ordered context and note segments.

    Example:
        >>> ec = EnrichedContext()
        >>> ec.add_context(["x1", "x2"])
        >>> ec.add_note(["n1"], GENERATED)
        >>> ec.add_context(["x3"])
        >>> ec.tokens(), ec.context_tokens()
        (['x1', 'x2', 'n1', 'x3'], ['x1', 'x2', 'x3'])
        >>> [(n.pos, n.tokens) for n in ec.notes()]
        [(2, ('n1',))]
    """

    def __init__(self, segments: Sequence[Segment] = ()):
        self.segments: List[Segment] = []
        for segment in segments:
            self._append(segment)

    def _append(self, segment: Segment):
        assert segment.origin in ORIGINS, f"unknown origin {segment.origin!r}"
        if not segment.tokens:
            return
        last = self.segments[-1] if self.segments else None
        if segment.origin == CONTEXT and last is not None and last.origin == CONTEXT:
            self.segments[-1] = Segment(CONTEXT, last.tokens + segment.tokens)
        else:
            self.segments.append(segment)

    def add_context(self, tokens: TokenLike):
        self._append(Segment(CONTEXT, tuple(tokens)))

    def add_note(self, tokens: TokenLike, origin: str = GENERATED):
        assert origin != CONTEXT, "notes need a note origin"
        self._append(Segment(origin, tuple(tokens)))

    def tokens(self) -> List[str]:
        return [tok for segment in self.segments for tok in segment.tokens]

    def context_tokens(self) -> List[str]:
        return [tok for segment in self.segments if not segment.is_note for tok in segment.tokens]

    def notes(self) -> List[NoteAnnotation]:
        """Note spans anchored to the number of context tokens before them."""
        notes, seen = [], 0
        for segment in self.segments:
            if segment.is_note:
                notes.append(NoteAnnotation(seen, segment.tokens))
            else:
                seen += len(segment.tokens)
        return notes

    def note_token_count(self) -> int:
        return sum(len(s.tokens) for s in self.segments if s.is_note)

    def __len__(self) -> int:
        return sum(len(s.tokens) for s in self.segments)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EnrichedContext) and self.segments == other.segments

    def __repr__(self) -> str:
        return f"EnrichedContext(tokens={len(self)}, notes={len(self.notes())})"

    def to_dict(self) -> List[Dict[str, Any]]:
        return [{"origin": s.origin, "tokens": list(s.tokens)} for s in self.segments]

    @classmethod
    def from_dict(cls, records: Sequence[Dict[str, Any]]) -> "EnrichedContext":
        return cls([Segment(r["origin"], tuple(r["tokens"])) for r in records])

    @classmethod
    def from_notes(
        cls, context: TokenLike, notes: Sequence[NoteAnnotation], origin: str = GOLD
    ) -> "EnrichedContext":
        """Splice annotated notes into a context."""
        enriched, cursor = cls(), 0
        for note in notes:
            enriched.add_context(context[cursor : note.pos])
            cursor = max(cursor, note.pos)
            enriched.add_note(note.tokens, origin)
        enriched.add_context(context[cursor:])
        return enriched
