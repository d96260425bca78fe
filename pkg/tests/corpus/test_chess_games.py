"""Chess game ingestion, replay and sample tests."""

from pathlib import Path

import pytest

from kedro_selfnotes.corpus.chess_games import (
    ingest_chess_games,
    load_fixture_games,
    make_chess_sample,
    parse_game_line,
    track_pieces,
)
from kedro_selfnotes.errors import CutOutOfRange, EmptyFile, IllegalReplay


def test_fixture_games_replay():
    """Every bundled game replays with occupied from squares."""
    games = load_fixture_games()
    assert len(games) == 50
    for game in games:
        assert len(track_pieces(game)) == len(game.moves)


def test_ingest_skips_bad_lines(tmp_path: Path):
    """Malformed and unreplayable lines are skipped, not fatal.

    Args:
        tmp_path (Path): pytest temporary directory
    """
    path = tmp_path / "games.txt"
    path.write_text("# header\ne2 e4 e7 e5\ne2\ne3 e4 e7 e5\n\ng1 f3\n")
    ingested = ingest_chess_games(path)
    assert len(ingested.games) == 2
    assert [number for number, _ in ingested.skipped] == [3, 4]


def test_ingest_empty_file(tmp_path: Path):
    """A file without game lines is an error.

    Args:
        tmp_path (Path): pytest temporary directory
    """
    path = tmp_path / "empty.txt"
    path.write_text("# nothing\n\n")
    with pytest.raises(EmptyFile):
        ingest_chess_games(path)


def test_ingest_missing_file(tmp_path: Path):
    """A missing file raises ``FileNotFoundError``.

    Args:
        tmp_path (Path): pytest temporary directory
    """
    with pytest.raises(FileNotFoundError):
        ingest_chess_games(tmp_path / "missing.txt")


def test_replay_from_empty_square():
    """Moving from an empty square is an illegal replay."""
    with pytest.raises(IllegalReplay):
        track_pieces(parse_game_line("e3 e4"))


def test_piece_and_move_samples():
    """The piece task asks what stands on the last from square, the move task where it goes."""
    game = parse_game_line("e2 e4 e7 e5 g1 f3 b8 c6")
    piece = make_chess_sample(game, 3, "chess_piece")
    assert piece.context == ("e2", "e4", "e7", "e5", "g1")
    assert piece.answer == ("N",)
    assert [(n.pos, n.tokens) for n in piece.notes] == [(1, ("P",)), (3, ("P",)), (5, ("N",))]
    move = make_chess_sample(game, 3, "chess_move")
    assert move.question == ("MOVE",)
    assert move.answer == ("f3",)
    assert move.difficulty == 3


def test_cut_out_of_range():
    """Cuts outside the game are rejected."""
    with pytest.raises(CutOutOfRange):
        make_chess_sample(parse_game_line("e2 e4"), 2, "chess_piece")


CASTLING_GAME = "e2 e4 e7 e5 g1 f3 b8 c6 f1 c4 f8 c5 e1 g1 g8 f6 f3 e5 c6 e5 f1 e1"


def test_castling_moves_the_rook_and_captures_replace_pieces():
    """Castling carries the rook along and a capture leaves the capturer on the square."""
    game = parse_game_line(CASTLING_GAME)
    assert track_pieces(game) == ["P", "P", "N", "N", "B", "B", "K", "N", "N", "N", "R"]
    sample = make_chess_sample(game, len(game.moves), "chess_piece")
    assert sample.context[-1] == "f1"
    assert sample.answer == ("R",)


@pytest.mark.parametrize(
    "line",
    [
        CASTLING_GAME + " h1 h2",
        "e2 e4 a7 a6 e4 e5 d7 d5 e5 d6 d5 d4",
    ],
)
def test_vacated_squares_are_empty(line: str):
    """The rook leaves h1 on castling and an en passant capture clears the passed pawn.

    Args:
        line (str): game whose last move starts from an emptied square
    """
    with pytest.raises(IllegalReplay):
        track_pieces(parse_game_line(line))


def test_en_passant_capturer_is_tracked():
    """The pawn that captured en passant is found on its new square."""
    game = parse_game_line("e2 e4 a7 a6 e4 e5 d7 d5 e5 d6 b8 c6 d6 c7")
    assert track_pieces(game) == ["P", "P", "P", "P", "P", "N", "P"]
