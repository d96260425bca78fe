"""Dummy-token ablation: extra compute without informative content."""

import logging
from typing import Callable, Dict, List, Sequence

from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.targets import PLACEMENTS, insert_dummies
from kedro_selfnotes.errors import InvalidConfig
from kedro_selfnotes.evalharness.evaluate import EvalReport, evaluate
from kedro_selfnotes.evalharness.splits import SplitSpec
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.textmodel.transformer import LanguageModel

logger = logging.getLogger(__name__)

ModelFactory = Callable[[str, Sequence[Sample]], LanguageModel]
"""Trains (or builds) a model for a method on the given training samples."""

ABLATION_ARMS = ("vanilla", *PLACEMENTS, "selfnotes")


def dummy_variant(samples: Sequence[Sample], placement: str, count_per_site: int = 1) -> List[Sample]:
    return [insert_dummies(sample, placement, count_per_site) for sample in samples]


def run_dummy_ablation(
    factory: ModelFactory,
    train_samples: Sequence[Sample],
    test_samples: Sequence[Sample],
    dc: DecodeConfig,
    split: SplitSpec,
    arms: Sequence[str] = ABLATION_ARMS,
    count_per_site: int = 1,
    manifest_hash: str = "",
    seed: int = 0,
) -> Dict[str, EvalReport]:
    """One report per arm, keyed by arm name.

    Dummy arms train a vanilla model on dummy-inserted samples and are
    evaluated on test samples with the same placement; ``vanilla`` and
    ``selfnotes`` use the samples as they are.
    """
    unknown = [arm for arm in arms if arm not in ABLATION_ARMS]
    if unknown:
        raise InvalidConfig(f"unknown ablation arms {unknown}, expected some of {ABLATION_ARMS}")
    reports: Dict[str, EvalReport] = {}
    for arm in arms:
        if arm in PLACEMENTS:
            train = dummy_variant(train_samples, arm, count_per_site)
            test = dummy_variant(test_samples, arm, count_per_site)
            model = factory("vanilla", train)
            report = evaluate(model, test, "vanilla", dc, split, manifest_hash, seed)
            report.method = f"dummy_{arm}"
        else:
            model = factory(arm, train_samples)
            report = evaluate(model, test_samples, arm, dc, split, manifest_hash, seed)
        logger.info(f"Dummy ablation arm {arm}: accuracy {report.accuracy}")
        reports[arm] = report
    return reports
