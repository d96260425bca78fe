"""Training regime and unsupervised ladder settings."""

from dataclasses import dataclass, field
from typing import List, Optional

from kedro_selfnotes.errors import InvalidConfig

REGIMES = ("supervised", "semi_supervised", "unsupervised")
METHODS = ("vanilla", "scratchpad", "selfnotes")
STAGES = ("vanilla", "notes", "boost", "multi", "finetune")


@dataclass
class RegimeConfig:
    """Which regime builds the training data and how the unsupervised loop refreshes.

    Example:
        >>> RegimeConfig(regime="semi_supervised", p=0.25).validate().p
        0.25
        >>> RegimeConfig(regime="unsupervised", method="scratchpad").validate()
        Traceback (most recent call last):
        ...
        kedro_selfnotes.errors.InvalidConfig: the unsupervised regime writes notes, method 'scratchpad' cannot
    """

    regime: str = "supervised"
    method: str = "selfnotes"
    p: float = 1.0
    refresh_every: int = 1
    finetune_rounds: int = 1
    confidence_threshold: Optional[float] = None
    seed: int = 0

    def validate(self) -> "RegimeConfig":
        if self.regime not in REGIMES:
            raise InvalidConfig(f"unknown regime {self.regime!r}, expected one of {REGIMES}")
        if self.method not in METHODS:
            raise InvalidConfig(f"unknown method {self.method!r}, expected one of {METHODS}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidConfig(f"p must lie in [0, 1], got {self.p}")
        if self.regime == "unsupervised" and self.method == "scratchpad":
            raise InvalidConfig(
                f"the unsupervised regime writes notes, method {self.method!r} cannot"
            )
        if self.refresh_every < 1:
            raise InvalidConfig(f"refresh_every must be positive, got {self.refresh_every}")
        if self.finetune_rounds < 0:
            raise InvalidConfig(f"finetune_rounds must be non-negative, got {self.finetune_rounds}")
        return self


@dataclass
class LadderConfig:
    """Stages of the unsupervised ladder and the decode knobs each stage adds.

    ``note_start``/``note_end`` override the vocabulary note tokens; Toy-Story
    triggers on the question start ``Q:``. ``sequential`` trains the base
    model with sequential conditioning instead of plain QA training.
    """

    stages: List[str] = field(default_factory=lambda: list(STAGES))
    boost: float = 5.0
    num_samples: int = 8
    temperature: float = 1.0
    answer_only_insertion: bool = True
    suppress_duplicates: bool = True
    note_start: Optional[List[str]] = None
    note_end: Optional[List[str]] = None
    sequential: bool = False

    def validate(self) -> "LadderConfig":
        unknown = [stage for stage in self.stages if stage not in STAGES]
        if unknown:
            raise InvalidConfig(f"unknown ladder stages {unknown}, expected some of {STAGES}")
        if self.boost < 1.0:
            raise InvalidConfig(f"boost must be at least 1, got {self.boost}")
        if self.num_samples < 1:
            raise InvalidConfig(f"num_samples must be positive, got {self.num_samples}")
        return self
