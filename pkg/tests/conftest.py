"""Autouse fixtures and shared builders for tests."""

import logging
from pprint import pprint
from typing import List

import pytest

from kedro_selfnotes.corpus.programs import make_program_sample
from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.toy_story import at, has, inside, make_toy_story_sample, with_
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.textmodel.config import ModelConfig


@pytest.fixture(autouse=True)
def disable_logging(doctest_namespace: dict):
    """Disable logging for all doctests."""
    logging.disable(logging.ERROR)


@pytest.fixture(autouse=True)
def add_libs(doctest_namespace: dict):
    """Add libraries to doctest namespace."""
    doctest_namespace["pprint"] = pprint


@pytest.fixture()
def toy_samples() -> List[Sample]:
    """Returns hand-written toy story samples with known answers.

    Returns:
        List[Sample]: two toy story samples
    """
    return [
        make_toy_story_sample(
            [at("Alice", "park"), with_("Bob", "Alice"), has("Bob", "key")],
            "Q: Where is the key ?".split(),
            seed=0,
        ),
        make_toy_story_sample(
            [has("Mary", "ball"), inside("ball", "box"), inside("key", "box")],
            "Q: Who has the key ?".split(),
            seed=1,
        ),
    ]


@pytest.fixture()
def program_samples() -> List[Sample]:
    """Returns hand-written algorithmic samples.

    Returns:
        List[Sample]: two algorithmic samples
    """
    return [
        make_program_sample("algorithmic", "x = 1 ; x ++ ;".split(), "x", seed=0),
        make_program_sample(
            "algorithmic", "e = 3 ; e ++ ; i = 3 ; if i < e : e ++ ;".split(), "e", seed=1
        ),
    ]


@pytest.fixture()
def tiny_model_config() -> ModelConfig:
    """Returns a model config small enough for unit tests.

    Returns:
        ModelConfig: one layer, width 16
    """
    return ModelConfig(
        num_layers=1,
        num_heads=2,
        model_width=16,
        ffn_width=32,
        max_positions=128,
        pos_offset_range=(0, 8),
    )


@pytest.fixture()
def toy_vocab(toy_samples: List[Sample]) -> Vocabulary:
    """Returns the toy story vocabulary of ``toy_samples``.

    Args:
        toy_samples (List[Sample]): toy story samples

    Returns:
        Vocabulary: toy story vocabulary
    """
    return Vocabulary.build("toy_story", toy_samples)
