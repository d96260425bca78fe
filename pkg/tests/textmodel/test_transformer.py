"""Transformer initialisation and next-token distribution tests."""

from dataclasses import replace

import pytest
import torch

from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.errors import ContextOverflow, InvalidConfig
from kedro_selfnotes.textmodel.config import ModelConfig
from kedro_selfnotes.textmodel.transformer import ModelState, init_model, next_token_dist


@pytest.fixture()
def state(tiny_model_config: ModelConfig, toy_vocab: Vocabulary) -> ModelState:
    """Returns a fresh tiny model over the toy vocabulary.

    Args:
        tiny_model_config (ModelConfig): tiny model shape
        toy_vocab (Vocabulary): toy story vocabulary

    Returns:
        ModelState: untrained model
    """
    return init_model(replace(tiny_model_config, vocab_size=len(toy_vocab)), toy_vocab)


def test_init_is_deterministic(state: ModelState):
    """The same seed gives bit-identical weights.

    Args:
        state (ModelState): untrained model
    """
    twin = init_model(state.config, state.vocab)
    for (name, left), (_, right) in zip(
        state.module.state_dict().items(), twin.module.state_dict().items()
    ):
        assert torch.equal(left, right), name


def test_init_rejects_bad_width(toy_vocab: Vocabulary):
    """A width not divisible by the head count is invalid.

    Args:
        toy_vocab (Vocabulary): toy story vocabulary
    """
    cfg = ModelConfig(vocab_size=len(toy_vocab), model_width=130, num_heads=4)
    with pytest.raises(InvalidConfig):
        init_model(cfg, toy_vocab)


def test_init_rejects_vocab_mismatch(tiny_model_config: ModelConfig, toy_vocab: Vocabulary):
    """The configured vocabulary size must match the vocabulary.

    Args:
        tiny_model_config (ModelConfig): tiny model shape
        toy_vocab (Vocabulary): toy story vocabulary
    """
    with pytest.raises(InvalidConfig):
        init_model(replace(tiny_model_config, vocab_size=len(toy_vocab) + 1), toy_vocab)


def test_distributions_are_normalised(state: ModelState):
    """Every row is a probability vector over the vocabulary.

    Args:
        state (ModelState): untrained model
    """
    ids = state.vocab.encode(["<bos>", "Alice", "is", "at", "the", "park", "."])
    probs = state.distributions(ids)
    assert probs.shape == (len(ids), len(state.vocab))
    assert torch.allclose(probs.sum(dim=-1), torch.ones(len(ids)), atol=1e-5)
    assert torch.all(probs >= 0)


def test_distributions_are_causal(state: ModelState):
    """Predictions for a prefix do not depend on later tokens.

    Args:
        state (ModelState): untrained model
    """
    ids = state.vocab.encode(["<bos>", "Bob", "has", "the", "key", "."])
    longer = ids + state.vocab.encode(["Q:", "Who", "has"])
    assert torch.allclose(state.distributions(ids), state.distributions(longer)[: len(ids)], atol=1e-6)
    assert torch.allclose(next_token_dist(state, ids), state.distributions(longer)[len(ids) - 1], atol=1e-6)


def test_overflow(state: ModelState):
    """Prefixes beyond the positions raise ``ContextOverflow``.

    Args:
        state (ModelState): untrained model
    """
    ids = [state.vocab.bos_id] * (state.max_positions + 1)
    with pytest.raises(ContextOverflow):
        next_token_dist(state, ids)


def test_empty_prefix(state: ModelState):
    """An empty prefix has nothing to condition on.

    Args:
        state (ModelState): untrained model
    """
    with pytest.raises(ValueError):
        state.distributions([])
