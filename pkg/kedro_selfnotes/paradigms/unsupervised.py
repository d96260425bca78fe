"""Sequential-conditioning training, enrichment generation and finetuning."""

import copy
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence

import torch

from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.notectl.decoding import decode_selfnotes, multi_sample_enrich
from kedro_selfnotes.notectl.enriched import EnrichedContext
from kedro_selfnotes.paradigms.config import RegimeConfig
from kedro_selfnotes.paradigms.sequences import enriched_sequence
from kedro_selfnotes.textmodel.config import TrainConfig
from kedro_selfnotes.textmodel.training import (
    TrainingSequence,
    TrainReport,
    check_fits,
    make_optimizer,
    sample_offsets,
    train,
    train_step,
)
from kedro_selfnotes.textmodel.transformer import LanguageModel, ModelState
from kedro_selfnotes.utils.constants import MAX_WORKERS
from kedro_selfnotes.utils.iterable import chunked

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnrichedSample:
    """A training sample with the enrichment a model wrote for it."""

    sample: Sample
    enriched: EnrichedContext
    overflow: bool = False
    confidence: Optional[float] = None

    def to_sequence(self, method: str = "selfnotes") -> TrainingSequence:
        return enriched_sequence(self.sample, self.enriched, method)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sample": self.sample.to_dict(),
            "segments": self.enriched.to_dict(),
            "overflow": self.overflow,
            "confidence": self.confidence,
        }

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "EnrichedSample":
        return cls(
            sample=Sample.from_dict(record["sample"]),
            enriched=EnrichedContext.from_dict(record["segments"]),
            overflow=bool(record["overflow"]),
            confidence=record.get("confidence"),
        )


def enrich_sample(model: LanguageModel, sample: Sample, dc: DecodeConfig) -> EnrichedSample:
    """Self-Notes decode of one sample; overflowing samples pass through unenriched.

    Args:
        model (LanguageModel): model writing the notes
        sample (Sample): sample to enrich
        dc (DecodeConfig): note decoding settings, multi-sample when
            ``num_samples > 1``

    Returns:
        EnrichedSample: the sample with the notes the model wrote
    """
    if dc.num_samples > 1:
        result = multi_sample_enrich(model, sample.context, sample.question, dc, sample.task)
    else:
        result = decode_selfnotes(model, sample.context, sample.question, dc, task=sample.task)
    if result.overflow or result.enriched is None:
        logger.warning(f"Enrichment of sample {sample.seed} overflowed, kept unenriched")
        return EnrichedSample(sample, EnrichedContext.from_notes(sample.context, ()), overflow=True)
    confidence = result.confidence
    if confidence is not None and math.isinf(confidence):
        confidence = None
    return EnrichedSample(sample, result.enriched, confidence=confidence)


def generate_enriched_corpus(
    model: LanguageModel,
    samples: Sequence[Sample],
    dc: DecodeConfig,
    workers: int = MAX_WORKERS,
) -> List[EnrichedSample]:
    """Enrich every sample with the model's own notes, in sample order.

    The question and answer of each sample are kept as they are.

    Args:
        model (LanguageModel): model writing the notes
        samples (Sequence[Sample]): samples to enrich
        dc (DecodeConfig): note decoding settings
        workers (int): decoding threads

    Returns:
        List[EnrichedSample]: one enriched sample per input sample
    """
    with ThreadPoolExecutor(max_workers=workers) as pool:
        corpus = list(pool.map(lambda sample: enrich_sample(model, sample, dc), samples))
    notes = sum(len(item.enriched.notes()) for item in corpus)
    overflow = sum(item.overflow for item in corpus)
    logger.info(f"Enriched {len(corpus)} samples: {notes} notes, {overflow} overflowed")
    return corpus


def _sequential_config(tc: TrainConfig) -> TrainConfig:
    return replace(tc, loss_mask="notes_and_qa") if tc.loss_mask == "auto" else tc


def _fitting(state: ModelState, sequences: List[TrainingSequence]) -> List[TrainingSequence]:
    limit = state.config.max_positions - state.config.pos_offset_range[1]
    kept = [seq for seq in sequences if len(seq) <= limit]
    if len(kept) < len(sequences):
        logger.warning(f"Skipped {len(sequences) - len(kept)} enriched sequences over {limit} tokens")
    return kept


def train_unsupervised_sequential(
    state: ModelState,
    samples: Sequence[Sample],
    tc: TrainConfig,
    dc: DecodeConfig,
    rc: Optional[RegimeConfig] = None,
) -> TrainReport:
    """Train ``state`` in place, conditioning each step on the model's own notes.

    Every ``rc.refresh_every`` samples the current model writes Self-Notes
    over their contexts; the loss then covers the notes it wrote plus the
    final question and answer. With no notes written this is plain QA
    training.

    Args:
        state (ModelState): model trained in place
        samples (Sequence[Sample]): training samples, gold notes unused
        tc (TrainConfig): training settings
        dc (DecodeConfig): note decoding settings
        rc (Optional[RegimeConfig]): refresh interval

    Returns:
        TrainReport: per-step losses and epoch means
    """
    rc = (rc or RegimeConfig(regime="unsupervised")).validate()
    tc = _sequential_config(tc).validate()
    report = TrainReport()
    if not samples:
        logger.warning("No training samples, nothing to do")
        return report
    plain = [enriched_sequence(s, EnrichedContext.from_notes(s.context, ())) for s in samples]
    check_fits(state, plain)
    optimizer = make_optimizer(state, tc)
    generator = torch.Generator().manual_seed(tc.seed)
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(tc.seed)
        for epoch in range(1, tc.epochs + 1):
            order = torch.randperm(len(samples), generator=generator).tolist()
            epoch_losses = []
            for rows in chunked(order, rc.refresh_every):
                sequences = [
                    enrich_sample(state, samples[i], dc).to_sequence() for i in rows
                ]
                sequences = _fitting(state, sequences)
                for batch in chunked(sequences, tc.batch_size):
                    offsets = sample_offsets(state, len(batch), generator)
                    loss = train_step(state, optimizer, batch, offsets, tc)
                    if loss is None:
                        continue
                    report.losses.append(loss)
                    report.epochs.append(epoch)
                    epoch_losses.append(loss)
            report.end_epoch(epoch, epoch_losses, tc.epochs)
    state.module.eval()
    return report


def finetune_on_enrichments(
    state: ModelState,
    corpus: Sequence[EnrichedSample],
    tc: TrainConfig,
    rounds: int = 1,
    confidence_threshold: Optional[float] = None,
) -> ModelState:
    """A finetuned copy of ``state`` trained on the enriched sequences.

    With ``confidence_threshold`` only enrichments at least that confident
    are used; overflowed samples always train on their plain context.

    Args:
        state (ModelState): model to start from, left unchanged
        corpus (Sequence[EnrichedSample]): non-empty enriched corpus
        tc (TrainConfig): training settings
        rounds (int): full training runs over the corpus, seeded apart
        confidence_threshold (Optional[float]): lowest kept confidence

    Returns:
        ModelState: the finetuned copy
    """
    assert len(corpus) > 0, "the enriched corpus is empty"
    if confidence_threshold is not None:
        corpus = [
            item
            for item in corpus
            if item.overflow or (item.confidence is not None and item.confidence >= confidence_threshold)
        ]
        logger.info(f"{len(corpus)} enrichments reach confidence {confidence_threshold}")
    tuned = ModelState(
        module=copy.deepcopy(state.module),
        config=state.config,
        vocab=state.vocab,
        step=state.step,
    )
    sequences = _fitting(tuned, [item.to_sequence() for item in corpus])
    for round_ in range(rounds):
        report = train(tuned, sequences, replace(tc, seed=tc.seed + round_))
        logger.info(f"Finetune round {round_ + 1}/{rounds}: final loss {report.final_loss:.4f}")
    return tuned
