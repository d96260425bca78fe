"""Training sequences for each method and regime."""

import logging
import random
from typing import List, Optional, Sequence, Set

from kedro_selfnotes.corpus.readers import annotate_context
from kedro_selfnotes.corpus.sample import (
    BOS,
    CLOSE_BRACKET,
    EOS,
    OPEN_BRACKET,
    SEMI_PREFIX,
    Sample,
)
from kedro_selfnotes.corpus.targets import is_copy_style, scratchpad_body
from kedro_selfnotes.errors import MissingNotes
from kedro_selfnotes.notectl.enriched import EnrichedContext
from kedro_selfnotes.paradigms.config import RegimeConfig
from kedro_selfnotes.textmodel.training import (
    ANSWER,
    CONTEXT,
    NOTE,
    PREFIX,
    QUESTION,
    SCRATCHPAD,
    TrainingSequence,
)

logger = logging.getLogger(__name__)


class _Builder:
    def __init__(self, method: str, copy_style: bool):
        self.method = method
        self.copy_style = copy_style
        self.tokens: List[str] = []
        self.roles: List[str] = []

    def add(self, tokens, role: str) -> "_Builder":
        self.tokens.extend(tokens)
        self.roles.extend([role] * len(tokens))
        return self

    def build(self) -> TrainingSequence:
        return TrainingSequence(tuple(self.tokens), tuple(self.roles), self.method, self.copy_style)


def _start(method: str, sample: Sample, semi_prefix: bool) -> _Builder:
    builder = _Builder(method, is_copy_style(sample.task)).add([BOS], PREFIX)
    if semi_prefix:
        builder.add([SEMI_PREFIX], PREFIX)
    return builder


def _finish(builder: _Builder, sample: Sample) -> TrainingSequence:
    return builder.add(sample.answer, ANSWER).add([EOS], ANSWER).build()


def enriched_sequence(
    sample: Sample,
    enriched: EnrichedContext,
    method: str = "selfnotes",
    semi_prefix: bool = False,
) -> TrainingSequence:
    """``<bos>``, the enriched context, question and answer."""
    builder = _start(method, sample, semi_prefix)
    for segment in enriched.segments:
        builder.add(segment.tokens, NOTE if segment.is_note else CONTEXT)
    return _finish(builder.add(sample.question, QUESTION), sample)


def sample_sequence(sample: Sample, method: str, semi_prefix: bool = False) -> TrainingSequence:
    """One training sequence of ``sample`` for ``method``.

    Args:
        sample (Sample): sample to serialize
        method (str): ``vanilla``, ``scratchpad`` or ``selfnotes``
        semi_prefix (bool): start with the ``<s>`` marker of note-free samples

    Returns:
        TrainingSequence: tokens with the role of each

    Example:
        >>> from kedro_selfnotes.corpus.programs import make_program_sample
        >>> s = make_program_sample("algorithmic", "x = 1 ; x ++ ;".split(), "x")
        >>> " ".join(sample_sequence(s, "selfnotes").tokens)
        '<bos> x = 1 ; x ++ ; print x x = 2 ; print x x = 2 ; <eos>'
        >>> " ".join(sample_sequence(s, "vanilla", semi_prefix=True).tokens)
        '<bos> <s> x = 1 ; x ++ ; print x x = 2 ; <eos>'
    """
    if method == "selfnotes":
        enriched = EnrichedContext.from_notes(sample.context, sample.notes)
        return enriched_sequence(sample, enriched, method, semi_prefix)
    builder = _start(method, sample, semi_prefix).add(sample.context, CONTEXT)
    builder.add(sample.question, QUESTION)
    if method == "scratchpad":
        body = scratchpad_body(sample.task, sample.context, sample.notes)
        builder.add([OPEN_BRACKET, *body, CLOSE_BRACKET], SCRATCHPAD)
    return _finish(builder, sample)


def check_notes(sample: Sample):
    """Raise ``MissingNotes`` when a sample lacks the gold notes its context makes due."""
    if not sample.notes and annotate_context(sample.task, sample.context):
        raise MissingNotes(f"{sample.task} sample with seed {sample.seed} has no notes")


def supervised_subset(count: int, p: float, seed: int) -> Set[int]:
    """Indices keeping their notes: exactly ``round(p * count)`` of them, seeded.

    Args:
        count (int): number of samples
        p (float): fraction keeping their notes
        seed (int): selection seed

    Returns:
        Set[int]: the selected sample indices

    Example:
        >>> len(supervised_subset(10_000, 0.25, seed=0))
        2500
        >>> supervised_subset(8, 0.5, seed=3) == supervised_subset(8, 0.5, seed=3)
        True
    """
    return set(random.Random(seed).sample(range(count), round(p * count)))


def build_training_sequences(
    samples: Sequence[Sample],
    method: str,
    regime: str = "supervised",
    p: float = 1.0,
    seed: int = 0,
    config: Optional[RegimeConfig] = None,
) -> List[TrainingSequence]:
    """Sequences for ``samples`` under ``method`` and ``regime``.

    ``supervised`` uses every gold note, ``semi_supervised`` keeps the notes
    of a seeded ``p`` fraction and turns the rest into ``<s>``-prefixed
    vanilla sequences, ``unsupervised`` ignores notes altogether.

    Args:
        samples (Sequence[Sample]): training samples
        method (str): ``vanilla``, ``scratchpad`` or ``selfnotes``
        regime (str): ``supervised``, ``semi_supervised`` or ``unsupervised``
        p (float): supervised fraction of ``semi_supervised``
        seed (int): seed of the supervised subset
        config (Optional[RegimeConfig]): overrides the four settings above

    Returns:
        List[TrainingSequence]: one sequence per sample, in sample order

    Raises:
        MissingNotes: a note-based method meets a sample whose notes were stripped.
    """
    if config is not None:
        method, regime, p, seed = config.method, config.regime, config.p, config.seed
    RegimeConfig(regime=regime, method=method, p=p, seed=seed).validate()
    if regime == "unsupervised":
        return [sample_sequence(sample, "vanilla") for sample in samples]
    if regime == "supervised":
        keep = set(range(len(samples)))
    else:
        keep = supervised_subset(len(samples), p, seed)
    sequences = []
    for index, sample in enumerate(samples):
        if index in keep:
            if method != "vanilla":
                check_notes(sample)
            sequences.append(sample_sequence(sample, method))
        else:
            sequences.append(sample_sequence(sample.without_notes(), "vanilla", semi_prefix=True))
    if regime == "semi_supervised":
        logger.info(f"{len(keep)} of {len(samples)} sequences keep their notes (p={p})")
    return sequences
