"""The unsupervised ladder: vanilla, +notes, +boost, +multi-sample, +finetune."""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Union

from upath import UPath

from kedro_selfnotes.corpus.sample import Sample
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.evalharness.evaluate import EvalReport, evaluate
from kedro_selfnotes.evalharness.report import emit_report
from kedro_selfnotes.evalharness.splits import SplitSpec
from kedro_selfnotes.io.catalog import run_datasets
from kedro_selfnotes.io.checkpoint_dataset import Checkpoint
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.paradigms.config import LadderConfig, RegimeConfig
from kedro_selfnotes.paradigms.sequences import build_training_sequences
from kedro_selfnotes.paradigms.unsupervised import (
    EnrichedSample,
    finetune_on_enrichments,
    generate_enriched_corpus,
    train_unsupervised_sequential,
)
from kedro_selfnotes.textmodel.config import ModelConfig, TrainConfig
from kedro_selfnotes.textmodel.training import train
from kedro_selfnotes.textmodel.transformer import LanguageModel, ModelState, init_model

logger = logging.getLogger(__name__)


@dataclass
class LadderStage:
    name: str
    report: EvalReport
    model: LanguageModel
    corpus: Optional[List[EnrichedSample]] = None


def stage_decode_configs(dc: DecodeConfig, ladder: LadderConfig) -> Dict[str, DecodeConfig]:
    """Decode settings of every stage; each adds one knob to the previous one.

    Args:
        dc (DecodeConfig): base settings, used as they are by ``vanilla``
        ladder (LadderConfig): knobs the later stages switch on

    Returns:
        Dict[str, DecodeConfig]: settings per stage name

    Example:
        >>> configs = stage_decode_configs(DecodeConfig(), LadderConfig())
        >>> [configs[s].boost for s in ("notes", "boost", "multi")]
        [1.0, 5.0, 5.0]
        >>> configs["multi"].num_samples, configs["multi"].sampling
        (8, 'temperature')
    """
    notes = replace(
        dc,
        boost=1.0,
        num_samples=1,
        notes_enabled=True,
        answer_only_insertion=ladder.answer_only_insertion,
        suppress_duplicates=ladder.suppress_duplicates,
        note_start=ladder.note_start or dc.note_start,
        note_end=ladder.note_end or dc.note_end,
    )
    boost = replace(notes, boost=ladder.boost)
    multi = replace(
        boost, num_samples=ladder.num_samples, sampling="temperature", temperature=ladder.temperature
    )
    return {"vanilla": dc, "notes": notes, "boost": boost, "multi": multi, "finetune": multi}


def train_base_model(
    train_samples: Sequence[Sample],
    vocab: Vocabulary,
    model_cfg: ModelConfig,
    tc: TrainConfig,
    notes_dc: DecodeConfig,
    ladder: LadderConfig,
    rc: Optional[RegimeConfig] = None,
) -> ModelState:
    """QA-trained model the ladder starts from.

    Args:
        train_samples (Sequence[Sample]): training samples, notes unused
        vocab (Vocabulary): task vocabulary
        model_cfg (ModelConfig): model shape
        tc (TrainConfig): training settings
        notes_dc (DecodeConfig): note decoding used by sequential training
        ladder (LadderConfig): ``sequential`` picks the training loop
        rc (Optional[RegimeConfig]): refresh settings of sequential training

    Returns:
        ModelState: the trained model
    """
    state = init_model(model_cfg, vocab)
    if ladder.sequential:
        train_unsupervised_sequential(state, train_samples, tc, notes_dc, rc)
    else:
        train(state, build_training_sequences(train_samples, "vanilla", "unsupervised"), tc)
    return state


def _save_stage(stage: LadderStage, out_dir: UPath, manifest_hash: str):
    stage_dir = out_dir / stage.name
    datasets = run_datasets(stage_dir)
    if isinstance(stage.model, ModelState):
        datasets["checkpoint"].save(Checkpoint(stage.model, manifest_hash))
    if stage.corpus is not None:
        datasets["corpus"].save(stage.corpus)
    emit_report([stage.report], stage_dir)


def run_ladder(
    train_samples: Sequence[Sample],
    test_samples: Sequence[Sample],
    base: LanguageModel,
    dc: DecodeConfig,
    tc: TrainConfig,
    split: SplitSpec,
    ladder: Optional[LadderConfig] = None,
    rc: Optional[RegimeConfig] = None,
    out_dir: Optional[Union[str, UPath]] = None,
    manifest_hash: str = "",
) -> List[LadderStage]:
    """Evaluate each enabled stage in order, writing ``<out_dir>/<stage>/`` when given.

    The finetune stage enriches the training samples with the multi-sample
    decode and needs a trainable ``base``; any other model skips it.

    Args:
        train_samples (Sequence[Sample]): samples enriched for finetuning
        test_samples (Sequence[Sample]): samples every stage is scored on
        base (LanguageModel): QA-trained model
        dc (DecodeConfig): base decoding settings
        tc (TrainConfig): finetuning settings
        split (SplitSpec): split of ``test_samples``
        ladder (Optional[LadderConfig]): stages and their knobs
        rc (Optional[RegimeConfig]): finetune rounds and confidence filter
        out_dir (Optional[Union[str, UPath]]): where stage outputs go
        manifest_hash (str): run manifest hash stored on the reports

    Returns:
        List[LadderStage]: the evaluated stages in order
    """
    ladder = (ladder or LadderConfig()).validate()
    rc = rc or RegimeConfig(regime="unsupervised")
    configs = stage_decode_configs(dc, ladder)
    stages: List[LadderStage] = []
    for name in ladder.stages:
        model, corpus = base, None
        if name == "finetune":
            if not isinstance(base, ModelState):
                logger.warning("Finetune stage needs a trainable model, skipped")
                continue
            corpus = generate_enriched_corpus(base, train_samples, configs[name])
            model = finetune_on_enrichments(
                base, corpus, tc, rc.finetune_rounds, rc.confidence_threshold
            )
        method = "vanilla" if name == "vanilla" else "selfnotes"
        report = evaluate(model, test_samples, method, configs[name], split, manifest_hash, tc.seed)
        report.method = name
        stage = LadderStage(name, report, model, corpus)
        logger.info(f"Ladder stage {name}: accuracy {report.accuracy}")
        if out_dir is not None:
            _save_stage(stage, UPath(out_dir), manifest_hash)
        stages.append(stage)
    return stages
