"""Split generation and statistics tests."""

import pytest

from kedro_selfnotes.corpus.chess_games import load_fixture_games
from kedro_selfnotes.corpus.generate import (
    DEFAULT_SPLITS,
    SplitRequest,
    generate_split,
    split_stats,
)
from kedro_selfnotes.errors import InvalidConfig


def test_split_is_deterministic():
    """Per-sample seeds make splits reproducible."""
    request = SplitRequest(6, 2, 8)
    first = generate_split("algorithmic", "train", request, seed=5)
    assert first == generate_split("algorithmic", "train", request, seed=5)
    assert first != generate_split("algorithmic", "valid", request, seed=5)


def test_split_respects_difficulty_range():
    """Difficulties stay inside the requested range."""
    samples = generate_split("toy_story", "test", SplitRequest(6, 1, 3), seed=0)
    assert len(samples) == 6
    assert all(1 <= sample.difficulty <= 3 for sample in samples)


def test_chess_split_uses_games():
    """Chess splits cut ingested games."""
    samples = generate_split(
        "chess_piece", "train", SplitRequest(5, 1, 10), seed=0, games=load_fixture_games()
    )
    assert all(1 <= sample.difficulty <= 10 for sample in samples)
    assert all(len(sample.notes) == sample.difficulty for sample in samples)


def test_split_stats():
    """Stats count samples and histogram difficulties."""
    samples = generate_split("boolean_var", "train", SplitRequest(4, 3, 3), seed=0)
    stats = split_stats(samples)
    assert stats["count"] == 4
    assert stats["difficulty_histogram"] == {"3": 4}
    assert stats["notes_per_sample"] == 1.0


def test_default_splits_cover_every_task():
    """Each task has train, valid and test requests; test is the wider range."""
    for requests in DEFAULT_SPLITS.values():
        assert set(requests) == {"train", "valid", "test"}
        assert requests["test"].high >= requests["train"].high


@pytest.mark.parametrize("count, low, high", [(-1, 1, 2), (3, 0, 2), (3, 4, 2)])
def test_invalid_split_request(count: int, low: int, high: int):
    """Negative counts and empty difficulty ranges are rejected.

    Args:
        count (int): requested sample count
        low (int): lowest difficulty
        high (int): highest difficulty
    """
    with pytest.raises(InvalidConfig):
        SplitRequest(count, low, high)


def test_chess_split_needs_games():
    """Chess splits cannot be generated without ingested games."""
    with pytest.raises(InvalidConfig):
        generate_split("chess_move", "train", SplitRequest(2, 1, 4), seed=0)


def test_algorithmic_difficulty_below_two_is_rejected():
    """Integer programs need at least two statements."""
    with pytest.raises(InvalidConfig):
        generate_split("algorithmic", "train", SplitRequest(2, 1, 1), seed=0)
