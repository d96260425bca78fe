"""Scratchpad targets and dummy-token variants of samples."""

from dataclasses import replace
from typing import Dict, List, Sequence

from typing_extensions import Literal

from kedro_selfnotes.corpus.sample import (
    CLOSE_BRACKET,
    DUMMY,
    OPEN_BRACKET,
    NoteAnnotation,
    Sample,
    splice_notes,
)
from kedro_selfnotes.errors import InvalidConfig
from kedro_selfnotes.utils.typing import TokenLike

Placement = Literal["naive", "note_positions", "post_context"]
PLACEMENTS = ("naive", "note_positions", "post_context")

UNIT_ENDS: Dict[str, str] = {
    "toy_story": ".",
    "algorithmic": ";",
    "boolean_var": ";",
}
"""Token closing a sentence or statement; chess units are from squares."""


def is_copy_style(task: str) -> bool:
    """Whether the scratchpad copies the whole context."""
    return task != "toy_story"


def scratchpad_body(
    task: str, context: TokenLike, notes: Sequence[NoteAnnotation]
) -> List[str]:
    """Tokens between the scratchpad brackets."""
    if is_copy_style(task):
        return splice_notes(context, notes)
    return [tok for note in notes for tok in note.tokens]


def build_scratchpad_target(sample: Sample) -> List[str]:
    """Bracketed reasoning followed by the answer.

    Example:
        >>> from kedro_selfnotes.corpus.programs import make_program_sample
        >>> s = make_program_sample(
        ...     "algorithmic", "e = 3 ; e ++ ; i = 3 ; if i < e : e ++ ;".split(), "e")
        >>> " ".join(build_scratchpad_target(s))
        '[ e = 3 ; e ++ ; print e e = 4 ; i = 3 ; if i < e : e ++ ; print e e = 5 ; ] e = 5 ;'
    """
    body = scratchpad_body(sample.task, sample.context, sample.notes)
    return [OPEN_BRACKET] + body + [CLOSE_BRACKET] + list(sample.answer)


def unit_boundaries(task: str, context: TokenLike) -> List[int]:
    """Positions right after each sentence, statement or chess from square.

    Example:
        >>> unit_boundaries("chess_piece", "e2 e4 e7".split())
        [1, 3]
    """
    if task in UNIT_ENDS:
        end = UNIT_ENDS[task]
        return [i + 1 for i, tok in enumerate(context) if tok == end]
    return list(range(1, len(context) + 1, 2))


def insert_dummies(
    sample: Sample, placement: Placement, count_per_site: int = 1
) -> Sample:
    """Replace notes with uninformative dummy tokens.

    ``naive`` puts dummies after every unit, ``note_positions`` where the gold
    notes sit, ``post_context`` after the question, as many as
    ``note_positions`` would insert. The result carries no notes.

    Example:
        >>> from kedro_selfnotes.corpus.toy_story import at, has, make_toy_story_sample
        >>> s = make_toy_story_sample([at("Bob", "park"), has("Bob", "key")],
        ...                           "Q: Where is the key ?".split())
        >>> " ".join(insert_dummies(s, "note_positions").context)
        'Bob is at the park . Bob has the key . _'
        >>> insert_dummies(s, "post_context").question[-1]
        '_'
    """
    if count_per_site < 0:
        raise InvalidConfig(f"count_per_site must be non-negative, got {count_per_site}")
    dummies = [DUMMY] * count_per_site
    if placement == "post_context":
        extra = dummies * len(sample.notes)
        return replace(sample, question=tuple(sample.question) + tuple(extra), notes=())
    if placement == "note_positions":
        sites = [note.pos for note in sample.notes]
    elif placement == "naive":
        sites = unit_boundaries(sample.task, sample.context)
    else:
        raise ValueError(f"unknown placement {placement!r}, expected one of {PLACEMENTS}")
    filler = [NoteAnnotation(pos, tuple(dummies)) for pos in sites]
    return replace(sample, context=tuple(splice_notes(sample.context, filler)), notes=())


def dummy_count(sample: Sample) -> int:
    """Dummy tokens carried by a sample."""
    return sum(tok == DUMMY for tok in (*sample.context, *sample.question))
