"""Training loop, loss mask and gradient check tests."""

from dataclasses import replace
from typing import List

import pytest
import torch

from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.errors import ContextOverflow
from kedro_selfnotes.paradigms.sequences import sample_sequence
from kedro_selfnotes.textmodel.config import ModelConfig, TrainConfig
from kedro_selfnotes.textmodel.gradcheck import analytic_gradients, grad_check
from kedro_selfnotes.textmodel.training import TrainingSequence, loss_mask, train
from kedro_selfnotes.textmodel.transformer import ModelState, init_model


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


@pytest.fixture()
def sequences(toy_samples: List[Sample]) -> List[TrainingSequence]:
    """Returns Self-Notes training sequences of the toy samples.

    Args:
        toy_samples (List[Sample]): hand-written samples

    Returns:
        List[TrainingSequence]: one sequence per sample
    """
    return [sample_sequence(sample, "selfnotes") for sample in toy_samples]


def test_scratchpad_default_masks(toy_samples: List[Sample], program_samples: List[Sample]):
    """Copy-style scratchpads skip the context, notes-only ones keep it.

    Args:
        toy_samples (List[Sample]): hand-written toy samples
        program_samples (List[Sample]): hand-written program samples
    """
    copy_style = sample_sequence(program_samples[0], "scratchpad")
    notes_only = sample_sequence(toy_samples[0], "scratchpad")
    assert copy_style.default_mask == "answer_only"
    assert notes_only.default_mask == "context_and_answer"
    mask = loss_mask(copy_style)
    context = [role == "context" for role in copy_style.roles]
    assert not any(m and c for m, c in zip(mask, context))


def test_loss_decreases(state: ModelState, sequences: List[TrainingSequence]):
    """A tiny model memorises two sequences.

    Args:
        state (ModelState): untrained model
        sequences (List[TrainingSequence]): training sequences
    """
    report = train(state, sequences, TrainConfig(learning_rate=1e-2, batch_size=2, epochs=80))
    assert len(report.losses) == 80
    assert report.epoch_losses[-1] < 0.6 * report.epoch_losses[0]
    frame = report.to_frame()
    assert list(frame.columns) == ["step", "epoch", "loss", "accuracy"]
    assert state.step == 80


def test_training_is_deterministic(
    tiny_model_config: ModelConfig, toy_vocab: Vocabulary, sequences: List[TrainingSequence]
):
    """Same seeds, same losses.

    Args:
        tiny_model_config (ModelConfig): tiny model shape
        toy_vocab (Vocabulary): toy story vocabulary
        sequences (List[TrainingSequence]): training sequences
    """
    cfg = replace(tiny_model_config, vocab_size=len(toy_vocab))
    tc = TrainConfig(learning_rate=1e-3, batch_size=1, epochs=2)
    first = train(init_model(cfg, toy_vocab), sequences, tc)
    second = train(init_model(cfg, toy_vocab), sequences, tc)
    assert first.losses == second.losses


def test_eval_callback(state: ModelState, sequences: List[TrainingSequence]):
    """Accuracy is recorded every ``eval_every`` epochs.

    Args:
        state (ModelState): untrained model
        sequences (List[TrainingSequence]): training sequences
    """
    tc = TrainConfig(batch_size=2, epochs=4, eval_every=2)
    report = train(state, sequences, tc, evaluate=lambda _: 0.5)
    assert report.accuracies == [(2, 0.5), (4, 0.5)]
    assert report.to_frame()["accuracy"].notna().sum() == 2


def test_overflow_is_raised(
    tiny_model_config: ModelConfig, toy_vocab: Vocabulary, sequences: List[TrainingSequence]
):
    """Sequences that do not fit after the largest offset are rejected.

    Args:
        tiny_model_config (ModelConfig): tiny model shape
        toy_vocab (Vocabulary): toy story vocabulary
        sequences (List[TrainingSequence]): training sequences
    """
    cfg = replace(tiny_model_config, vocab_size=len(toy_vocab), max_positions=32)
    with pytest.raises(ContextOverflow):
        train(init_model(cfg, toy_vocab), sequences, TrainConfig(epochs=1))


def test_gradients_match_finite_differences(state: ModelState, sequences: List[TrainingSequence]):
    """Autograd agrees with central differences in double precision.

    Args:
        state (ModelState): untrained model
        sequences (List[TrainingSequence]): training sequences
    """
    assert grad_check(state, sequences[0], mode="all_tokens", samples_per_tensor=2) < 1e-3


def test_masked_out_sequence_has_zero_gradients(state: ModelState, sequences: List[TrainingSequence]):
    """Without answer or scratchpad tokens the answer-only loss has no gradient.

    Args:
        state (ModelState): untrained model
        sequences (List[TrainingSequence]): training sequences
    """
    sequence = sequences[0]
    cut = sequence.roles.index("answer")
    unanswered = TrainingSequence(sequence.tokens[:cut], sequence.roles[:cut], "selfnotes")
    grads = analytic_gradients(state, unanswered, mode="answer_only")
    assert all(torch.count_nonzero(grad) == 0 for grad in grads.values())
