"""UCI-style game files, board replay and chess samples."""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, NamedTuple, Optional, Tuple, Union

import chess
from upath import UPath

from kedro_selfnotes.corpus.sample import NoteAnnotation, Sample
from kedro_selfnotes.errors import CutOutOfRange, EmptyFile, IllegalReplay, MalformedGame

logger = logging.getLogger(__name__)

FIXTURE_GAMES = Path(__file__).parent / "fixtures" / "chess_games.txt"
"""Fifty recorded games shipped for tests and smoke runs."""

QUESTIONS = {"chess_piece": "PIECE", "chess_move": "MOVE"}
_SQUARE = re.compile(r"^[a-h][1-8]$")
_DESTINATION = re.compile(r"^([a-h][1-8])([qrbn])?$")


@dataclass(frozen=True)
class ChessMove:
    from_square: str
    to_square: str
    promotion: Optional[str] = None

    @property
    def destination(self) -> str:
        """Destination token, promotion letter included (``e8q``)."""
        return self.to_square + (self.promotion or "")

    def to_move(self) -> chess.Move:
        promotion = (
            chess.PIECE_SYMBOLS.index(self.promotion) if self.promotion else None
        )
        return chess.Move(
            chess.parse_square(self.from_square),
            chess.parse_square(self.to_square),
            promotion=promotion,
        )


@dataclass(frozen=True)
class ChessGame:
    moves: Tuple[ChessMove, ...]
    source: str = "ingested"

    def tokens(self) -> List[str]:
        return [tok for move in self.moves for tok in (move.from_square, move.destination)]


def parse_move(from_token: str, to_token: str) -> ChessMove:
    """Parse one move from its two square tokens.

    Example:
        >>> parse_move("e7", "e8q")
        ChessMove(from_square='e7', to_square='e8', promotion='q')
    """
    destination = _DESTINATION.match(to_token)
    if not _SQUARE.match(from_token) or destination is None:
        raise MalformedGame(f"bad move {from_token} {to_token}")
    return ChessMove(from_token, destination.group(1), destination.group(2))


def parse_game_line(line: str, source: str = "ingested") -> ChessGame:
    """Parse a space separated square list.

    Example:
        >>> len(parse_game_line("c2 c4 e7 e5").moves)
        2
    """
    tokens = line.split()
    if not tokens or len(tokens) % 2:
        raise MalformedGame(f"expected an even, non-zero token count, got {len(tokens)}")
    return ChessGame(
        tuple(parse_move(a, b) for a, b in zip(tokens[::2], tokens[1::2])), source
    )


class IngestedGames(NamedTuple):
    games: List[ChessGame]
    skipped: List[Tuple[int, str]]


def ingest_chess_games(
    path: Union[str, Path], source: str = "ingested"
) -> IngestedGames:
    """Read one game per line, skipping malformed or unreplayable ones.

    Raises:
        FileNotFoundError: the file does not exist.
        EmptyFile: the file holds no game lines.
    """
    text = UPath(str(path)).read_text(encoding="utf-8")
    lines = [
        (number, line.strip())
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise EmptyFile(f"{path} contains no games")
    games: List[ChessGame] = []
    skipped: List[Tuple[int, str]] = []
    for number, line in lines:
        try:
            game = parse_game_line(line, source)
            track_pieces(game)
        except (MalformedGame, IllegalReplay) as exc:
            logger.warning(f"{path}:{number}: skipped, {exc}")
            skipped.append((number, str(exc)))
            continue
        games.append(game)
    logger.info(f"Ingested {len(games)} games from {path}, skipped {len(skipped)}")
    return IngestedGames(games, skipped)


def load_fixture_games() -> List[ChessGame]:
    return ingest_chess_games(FIXTURE_GAMES, source="fixture").games


def piece_letter(board: chess.Board, square: str) -> str:
    piece = board.piece_at(chess.parse_square(square))
    if piece is None:
        raise IllegalReplay(f"no piece on {square}")
    return piece.symbol().upper()


class BoardTracker:
    """Occupancy-only replay: the from square must hold a piece, nothing else is checked."""

    def __init__(self):
        self.board = chess.Board()

    def piece_on(self, square: str) -> str:
        return piece_letter(self.board, square)

    def play(self, move: ChessMove) -> str:
        """Apply ``move`` and return the letter of the piece that moved."""
        letter = self.piece_on(move.from_square)
        self.board.push(move.to_move())
        return letter

    def copy(self) -> "BoardTracker":
        twin = BoardTracker()
        twin.board = self.board.copy(stack=False)
        return twin


def replay(game: ChessGame, limit: Optional[int] = None) -> Iterator[Tuple[ChessMove, str, chess.Board]]:
    """Yield each move, the piece that made it and the board after it."""
    tracker = BoardTracker()
    for index, move in enumerate(game.moves):
        if limit is not None and index >= limit:
            return
        try:
            letter = tracker.play(move)
        except IllegalReplay as exc:
            raise IllegalReplay(f"move {index + 1}: {exc}") from None
        yield move, letter, tracker.board


def track_pieces(game: ChessGame, limit: Optional[int] = None) -> List[str]:
    """Piece letter on each move's from square.

    Example:
        >>> track_pieces(parse_game_line("e2 e4 e7 e5 g1 f3"))
        ['P', 'P', 'N']
    """
    return [letter for _, letter, _ in replay(game, limit)]


def make_chess_sample(game: ChessGame, cut: int, task: str, seed: int = 0) -> Sample:
    """Sample asking about move ``cut`` (1-based) of ``game``.

    The context lists the earlier moves and the from square of move ``cut``.
    ``PIECE`` asks which piece stands there, ``MOVE`` where it goes.

    Example:
        >>> game = parse_game_line("e2 e4 e7 e5")
        >>> s = make_chess_sample(game, 1, "chess_piece")
        >>> s.context, s.question, s.answer
        (('e2',), ('PIECE',), ('P',))
    """
    if task not in QUESTIONS:
        raise ValueError(f"unknown chess task {task!r}")
    if not 1 <= cut <= len(game.moves):
        raise CutOutOfRange(f"cut {cut} outside [1, {len(game.moves)}]")
    pieces = track_pieces(game, cut)
    context: List[str] = []
    notes: List[NoteAnnotation] = []
    for index, move in enumerate(game.moves[:cut]):
        context.append(move.from_square)
        notes.append(NoteAnnotation(len(context), (pieces[index],)))
        if index < cut - 1:
            context.append(move.destination)
    current = game.moves[cut - 1]
    answer = pieces[-1] if task == "chess_piece" else current.destination
    return Sample(
        task=task,
        context=tuple(context),
        question=(QUESTIONS[task],),
        answer=(answer,),
        notes=tuple(notes),
        meta={"moves": cut},
        seed=seed,
    )
