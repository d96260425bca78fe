"""Unsupervised enrichment, sequential training and finetuning tests."""

from dataclasses import replace
from typing import List

import pytest
import torch

from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.paradigms.unsupervised import (
    EnrichedSample,
    enrich_sample,
    finetune_on_enrichments,
    generate_enriched_corpus,
    train_unsupervised_sequential,
)
from kedro_selfnotes.textmodel.config import ModelConfig, TrainConfig
from kedro_selfnotes.textmodel.oracle import make_oracle_model
from kedro_selfnotes.textmodel.transformer import ModelState, init_model

DECODE = DecodeConfig(max_note_len=4, max_answer_len=4, context_cap=128)


@pytest.fixture()
def state(tiny_model_config: ModelConfig, toy_vocab: Vocabulary) -> ModelState:
    """Returns an untrained tiny model over the toy vocabulary.

    Args:
        tiny_model_config (ModelConfig): tiny model shape
        toy_vocab (Vocabulary): toy story vocabulary

    Returns:
        ModelState: untrained model
    """
    return init_model(replace(tiny_model_config, vocab_size=len(toy_vocab)), toy_vocab)


@pytest.fixture()
def gold_corpus(toy_samples: List[Sample], toy_vocab: Vocabulary) -> List[EnrichedSample]:
    """Returns the enrichments an oracle writes.

    Args:
        toy_samples (List[Sample]): hand-written samples
        toy_vocab (Vocabulary): toy story vocabulary

    Returns:
        List[EnrichedSample]: enriched samples
    """
    oracle = make_oracle_model("toy_story", "selfnotes", toy_vocab, toy_samples)
    return generate_enriched_corpus(oracle, toy_samples, DecodeConfig(), workers=1)


def test_oracle_enrichment_is_gold(gold_corpus: List[EnrichedSample], toy_samples: List[Sample]):
    """An oracle enriches exactly with the gold notes, in sample order.

    Args:
        gold_corpus (List[EnrichedSample]): oracle enrichments
        toy_samples (List[Sample]): hand-written samples
    """
    assert [item.sample for item in gold_corpus] == toy_samples
    for item in gold_corpus:
        assert item.enriched.tokens() == item.sample.enriched_context()
        assert not item.overflow
        assert EnrichedSample.from_dict(item.to_dict()) == item


def test_overflowing_enrichment_is_plain(state: ModelState, toy_samples: List[Sample]):
    """Samples that overflow during enrichment keep their plain context.

    Args:
        state (ModelState): untrained model
        toy_samples (List[Sample]): hand-written samples
    """
    item = enrich_sample(state, toy_samples[0], replace(DECODE, context_cap=4))
    assert item.overflow
    assert item.enriched.tokens() == list(toy_samples[0].context)


def test_sequential_training(state: ModelState, toy_samples: List[Sample]):
    """Each refresh trains on the model's own enrichments.

    Args:
        state (ModelState): untrained model
        toy_samples (List[Sample]): hand-written samples
    """
    report = train_unsupervised_sequential(
        state, toy_samples, TrainConfig(batch_size=2, epochs=2), DECODE
    )
    assert len(report.losses) == 4
    assert len(report.epoch_losses) == 2
    assert state.step == 4


def test_finetune_returns_a_copy(state: ModelState, gold_corpus: List[EnrichedSample]):
    """Finetuning leaves the base model untouched.

    Args:
        state (ModelState): untrained model
        gold_corpus (List[EnrichedSample]): oracle enrichments
    """
    before = {name: tensor.clone() for name, tensor in state.module.state_dict().items()}
    tuned = finetune_on_enrichments(state, gold_corpus, TrainConfig(batch_size=2, epochs=2), rounds=2)
    assert tuned is not state
    assert tuned.step == 4
    assert state.step == 0
    for name, tensor in state.module.state_dict().items():
        assert torch.equal(tensor, before[name])
