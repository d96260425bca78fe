"""Vocabulary construction tests."""

import pytest

from kedro_selfnotes.corpus.sample import SPECIAL_TOKENS
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.errors import InvalidConfig


def test_build_orders_specials_first(toy_samples):
    """Specials keep their ids, the rest are sorted.

    Args:
        toy_samples (List[Sample]): hand-written samples
    """
    vocab = Vocabulary.build("toy_story", toy_samples)
    assert vocab.tokens[: len(SPECIAL_TOKENS)] == list(SPECIAL_TOKENS)
    rest = vocab.tokens[len(SPECIAL_TOKENS) :]
    assert rest == sorted(rest)
    assert {"Alice", "key", "SQ:"} <= set(rest)


def test_encode_decode(toy_samples):
    """Every sample token encodes and decodes back.

    Args:
        toy_samples (List[Sample]): hand-written samples
    """
    vocab = Vocabulary.build("toy_story", toy_samples)
    for sample in toy_samples:
        tokens = sample.enriched_context() + list(sample.question) + list(sample.answer)
        assert vocab.decode(vocab.encode(tokens)) == tokens


def test_with_note_tokens(toy_samples):
    """Swapping note tokens keeps ids and changes the start set.

    Args:
        toy_samples (List[Sample]): hand-written samples
    """
    vocab = Vocabulary.build("toy_story", toy_samples)
    swapped = vocab.with_note_tokens(["Q:"], ["."])
    assert swapped.tokens == vocab.tokens
    assert swapped.start_ids == frozenset([vocab.id("Q:")])
    assert Vocabulary.from_dict(swapped.to_dict()).note_start == ("Q:",)


def test_chess_vocabulary_has_every_square():
    """Chess vocabularies cover the board without samples."""
    vocab = Vocabulary.build("chess_piece", [])
    assert "a1" in vocab and "h8" in vocab
    assert vocab.start_ids == vocab.end_ids


@pytest.mark.parametrize(
    "tokens",
    [
        ["<pad>", "<bos>", "<eos>", "print", ";", "print"],
        ["<pad>", "<bos>", "<eos>", "print"],
    ],
)
def test_invalid_token_lists(tokens):
    """Duplicated tokens and missing note delimiters are rejected.

    Args:
        tokens (List[str]): candidate token list
    """
    with pytest.raises(InvalidConfig):
        Vocabulary(tokens, note_start=["print"], note_end=[";"])
