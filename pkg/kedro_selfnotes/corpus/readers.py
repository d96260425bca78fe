"""Token-level readers replaying a context prefix and the notes it makes due.

A reader consumes context tokens one at a time. Whenever a unit completes (a
sentence, a statement or a from square) it computes the gold notes due at
that point; the notes expire with the next context token. Readers back the
gold annotation check, the scripted oracle model and the scratchpad oracle.
"""

from typing import Dict, List, Optional, Sequence, Tuple, Type

import chess

from kedro_selfnotes.corpus import programs, toy_story
from kedro_selfnotes.corpus.chess_games import piece_letter
from kedro_selfnotes.corpus.sample import DUMMY, SEMI_PREFIX, NoteAnnotation, check_task
from kedro_selfnotes.corpus.vocabulary import PIECE_LETTERS
from kedro_selfnotes.utils.typing import TokenLike, Tokens

IGNORED_TOKENS = frozenset([DUMMY, SEMI_PREFIX])
"""Control tokens readers skip over."""


class Reader:
    """Base reader; subclasses implement :meth:`_complete_unit`."""

    question_starts: Tuple[str, ...] = ()

    def __init__(self, task: str):
        self.task = check_task(task)
        self.context: List[str] = []
        self.annotations: List[NoteAnnotation] = []
        self._pending: List[str] = []
        self._due: List[Tokens] = []
        self._carried: List[Tokens] = []

    @property
    def at_boundary(self) -> bool:
        """Whether no unit is half read."""
        return not self._pending

    def due_notes(self) -> List[Tokens]:
        return list(self._due)

    def feed(self, token: str):
        """Read one input token (context, or a note clause inserted as text)."""
        if token in IGNORED_TOKENS:
            return
        if not self._pending:
            self._carried = self._due
        self._due = []
        self._pending.append(token)
        if self._unit_complete(token):
            unit, self._pending = self._pending, []
            notes = self._complete_unit(unit)
            if notes is None:
                # the unit was a note written as plain text
                self._due = [
                    n for n in self._carried if n != tuple(unit) and not self._covered(n)
                ]
                return
            for note in notes:
                self.annotations.append(NoteAnnotation(len(self.context), note))
            self._due = notes

    def observe_note(self, note: TokenLike):
        """Mark a due note as written."""
        note = tuple(note)
        if note in self._due:
            self._due.remove(note)
        self._note_written(note)

    def is_question_start(self, token: str) -> bool:
        return token in self.question_starts

    def question_complete(self, question: TokenLike) -> bool:
        raise NotImplementedError

    def answer(self, question: TokenLike) -> List[str]:
        raise NotImplementedError

    def _unit_complete(self, token: str) -> bool:
        raise NotImplementedError

    def _complete_unit(self, unit: List[str]) -> Optional[List[Tokens]]:
        raise NotImplementedError

    def _covered(self, note: Tokens) -> bool:
        """Whether a note became redundant through text read since."""
        return False

    def _note_written(self, note: Tokens):
        pass


class ToyStoryReader(Reader):
    """Reads sentences into an incremental closure.

    Example:
        >>> reader = ToyStoryReader()
        >>> for token in "Mary has the ball . the ball is inside the box .".split():
        ...     reader.feed(token)
        >>> [" ".join(note) for note in reader.due_notes()]
        ['SQ: Who has the box ? Mary has the box .']
        >>> " ".join(reader.answer("Q: Who has the box ?".split()))
        'Mary has the box .'
    """

    question_starts = (toy_story.QUESTION_START,)

    def __init__(self, task: str = "toy_story"):
        super().__init__(task)
        self.tracker = toy_story.StoryTracker()
        self.mentioned = set()

    def _unit_complete(self, token: str) -> bool:
        return token == toy_story.SENTENCE_END

    def _complete_unit(self, unit: List[str]) -> Optional[List[Tokens]]:
        if unit[0] == toy_story.NOTE_START:
            self._note_written(tuple(unit))
            return None
        relation = toy_story.parse_sentence(unit)
        if relation in self.tracker.closed and relation not in self.tracker.stated:
            # a derived relation written as plain text is an answer-only note
            self.mentioned.add(relation)
            return None
        self.context.extend(unit)
        new = self.tracker.tell(relation)
        return [tuple(toy_story.note_tokens(rel)) for rel in new if rel not in self.mentioned]

    @staticmethod
    def _relation(note: Tokens) -> Optional[toy_story.Relation]:
        clause = list(note)
        if toy_story.QUESTION_MARK in clause:
            clause = clause[len(clause) - clause[::-1].index(toy_story.QUESTION_MARK) :]
        try:
            return toy_story.parse_sentence(clause)
        except (ValueError, IndexError):
            return None

    def _covered(self, note: Tokens) -> bool:
        return self._relation(note) in self.mentioned

    def _note_written(self, note: Tokens):
        relation = self._relation(note)
        if relation is not None:
            self.mentioned.add(relation)

    def question_complete(self, question: TokenLike) -> bool:
        return len(question) > 1 and question[-1] == toy_story.QUESTION_MARK

    def answer(self, question: TokenLike) -> List[str]:
        return toy_story.toy_story_answer(self.tracker.stated, question)


class ProgramReader(Reader):
    """Executes statements as their ``;`` arrives.

    Example:
        >>> reader = ProgramReader("algorithmic")
        >>> for token in "e = 3 ; e ++ ;".split():
        ...     reader.feed(token)
        >>> reader.due_notes()
        [('print', 'e', 'e', '=', '4', ';')]
    """

    question_starts = (programs.PRINT,)

    def __init__(self, task: str):
        super().__init__(task)
        self.tracker = programs.ProgramTracker(task)

    def _unit_complete(self, token: str) -> bool:
        return token == programs.END

    def _complete_unit(self, unit: List[str]) -> Optional[List[Tokens]]:
        if unit[0] == programs.PRINT:
            return None
        self.context.extend(unit)
        note = self.tracker.execute(programs.parse_statement(unit[:-1]))
        return [] if note is None else [tuple(note)]

    def question_complete(self, question: TokenLike) -> bool:
        return len(question) >= 2

    def answer(self, question: TokenLike) -> List[str]:
        return self.tracker.answer(question[1])


class ChessReader(Reader):
    """Replays squares on a board; a piece note is due after each from square.

    Example:
        >>> reader = ChessReader("chess_piece")
        >>> for token in "e2 e4 e7".split():
        ...     reader.feed(token)
        >>> reader.due_notes()
        [('P',)]
    """

    question_starts = ("PIECE", "MOVE")

    def __init__(self, task: str):
        super().__init__(task)
        self.board = chess.Board()
        self.from_square: Optional[str] = None
        self.last_from: Optional[str] = None

    def feed(self, token: str):
        if token in PIECE_LETTERS:
            return
        super().feed(token)

    def _unit_complete(self, token: str) -> bool:
        return True

    def _complete_unit(self, unit: List[str]) -> Optional[List[Tokens]]:
        square = unit[0]
        self.context.append(square)
        if self.from_square is None:
            self.from_square = self.last_from = square
            return [(piece_letter(self.board, square),)]
        move = chess.Move.from_uci(self.from_square + square)
        self.board.push(move)
        self.from_square = None
        return []

    def question_complete(self, question: TokenLike) -> bool:
        return len(question) >= 1

    def answer(self, question: TokenLike) -> List[str]:
        if question[0] == "MOVE":
            raise KeyError("move answers are not derivable from the prefix")
        assert self.last_from is not None, "no square mentioned yet"
        return [piece_letter(self.board, self.last_from)]


READERS: Dict[str, Type[Reader]] = {
    "toy_story": ToyStoryReader,
    "algorithmic": ProgramReader,
    "boolean_var": ProgramReader,
    "chess_piece": ChessReader,
    "chess_move": ChessReader,
}


def make_reader(task: str) -> Reader:
    return READERS[check_task(task)](task)


def annotate_context(task: str, context: Sequence[str]) -> List[NoteAnnotation]:
    """Gold notes of a context, recomputed token by token.

    Example:
        >>> notes = annotate_context("algorithmic", "x = 1 ; x -- ;".split())
        >>> [(n.pos, n.tokens) for n in notes]
        [(7, ('print', 'x', 'x', '=', '0', ';'))]
    """
    reader = make_reader(task)
    for token in context:
        reader.feed(token)
    return reader.annotations
