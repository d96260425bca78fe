"""Inference-time note ablations of a model trained with notes."""

import logging
from typing import Sequence

from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.evalharness.evaluate import EvalReport, evaluate
from kedro_selfnotes.evalharness.splits import SplitSpec
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.textmodel.transformer import LanguageModel

logger = logging.getLogger(__name__)


def evaluate_ablation_no_notes(
    model: LanguageModel,
    samples: Sequence[Sample],
    dc: DecodeConfig,
    split: SplitSpec,
    gold_notes: bool = False,
    manifest_hash: str = "",
    seed: int = 0,
) -> EvalReport:
    """Evaluate with note writing switched off, or with the gold notes fed in.

    ``gold_notes`` gives the upper bound of a model that always writes the
    right notes.

    Args:
        model (LanguageModel): model trained with notes
        samples (Sequence[Sample]): test samples
        dc (DecodeConfig): decoding settings
        split (SplitSpec): split the samples come from
        gold_notes (bool): feed the gold notes instead of disabling them
        manifest_hash (str): run manifest hash stored on the report
        seed (int): decoding seed

    Returns:
        EvalReport: report whose method is ``no_notes`` or ``gold_notes``
    """
    method = "gold_notes" if gold_notes else "no_notes"
    report = evaluate(model, samples, method, dc, split, manifest_hash, seed)
    logger.info(f"{split.task} {method} ablation: accuracy {report.accuracy}")
    return report
