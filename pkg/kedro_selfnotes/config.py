"""Experiment configuration: one structured schema, a YAML file and dotted overrides."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException
from upath import UPath

from kedro_selfnotes.corpus.generate import DEFAULT_SPLITS, SplitRequest, TaskConfigs
from kedro_selfnotes.corpus.programs import AlgorithmicConfig, BooleanConfig
from kedro_selfnotes.corpus.sample import TASKS
from kedro_selfnotes.corpus.toy_story import ToyStoryConfig
from kedro_selfnotes.errors import InvalidConfig
from kedro_selfnotes.evalharness.dummy import ABLATION_ARMS
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.notectl.decoding import DECODERS
from kedro_selfnotes.paradigms.config import LadderConfig, RegimeConfig
from kedro_selfnotes.textmodel.config import ModelConfig, TrainConfig
from kedro_selfnotes.utils.hashing import manifest_hash

logger = logging.getLogger(__name__)


@dataclass
class ToyStoryGen:
    num_people: int = 5
    num_items: int = 5
    num_places: int = 4
    num_sentences: int = 12


@dataclass
class AlgorithmicGen:
    num_variables: int = 3
    value_range: List[int] = field(default_factory=lambda: [0, 9])
    allow_nesting: bool = False


@dataclass
class BooleanGen:
    num_variables: int = 4


@dataclass
class SplitConf:
    count: int = 0
    low: int = 1
    high: int = 1


@dataclass
class GenConfig:
    """Generator settings; ``splits`` defaults to the task's dataset-statistics table.

    ``count`` overrides every split size (smoke runs), ``games`` points to a
    game file for the chess tasks (the bundled fixture when unset).
    """

    count: Optional[int] = None
    games: Optional[str] = None
    splits: Optional[Dict[str, SplitConf]] = None
    toy_story: ToyStoryGen = field(default_factory=ToyStoryGen)
    algorithmic: AlgorithmicGen = field(default_factory=AlgorithmicGen)
    boolean_var: BooleanGen = field(default_factory=BooleanGen)

    def task_configs(self) -> TaskConfigs:
        low, high = self.algorithmic.value_range
        return TaskConfigs(
            toy_story=ToyStoryConfig(
                num_people=self.toy_story.num_people,
                num_items=self.toy_story.num_items,
                num_places=self.toy_story.num_places,
                num_sentences=self.toy_story.num_sentences,
            ),
            algorithmic=AlgorithmicConfig(
                num_variables=self.algorithmic.num_variables,
                value_range=(low, high),
                allow_nesting=self.algorithmic.allow_nesting,
            ),
            boolean_var=BooleanConfig(num_variables=self.boolean_var.num_variables),
        )

    def split_requests(self, task: str) -> Dict[str, SplitRequest]:
        """Requests per split name, ``count`` applied last.

        Example:
            >>> GenConfig(count=10).split_requests("toy_story")["test"]
            SplitRequest(count=10, low=1, high=4)
        """
        if self.splits:
            requests = {
                name: SplitRequest(conf.count, conf.low, conf.high)
                for name, conf in self.splits.items()
            }
        else:
            requests = dict(DEFAULT_SPLITS[task])
        if self.count is not None:
            requests = {
                name: SplitRequest(self.count, req.low, req.high) for name, req in requests.items()
            }
        return requests


@dataclass
class EvalConfig:
    """``method`` defaults to the training method of ``regime``."""

    method: Optional[str] = None
    split: str = "default"
    replicates: int = 1
    keep_traces: bool = True


@dataclass
class AblationConfig:
    mode: str = "dummy"
    arms: List[str] = field(default_factory=lambda: list(ABLATION_ARMS))
    count_per_site: int = 1


@dataclass
class ExperimentConfig:
    """Everything a command needs; the resolved form is the run manifest."""

    task: str = "toy_story"
    seed: int = 0
    gen: GenConfig = field(default_factory=GenConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    decode: DecodeConfig = field(default_factory=DecodeConfig)
    regime: RegimeConfig = field(default_factory=RegimeConfig)
    ladder: LadderConfig = field(default_factory=LadderConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)

    def validate(self) -> "ExperimentConfig":
        if self.task not in TASKS:
            raise InvalidConfig(f"unknown task {self.task!r}, expected one of {TASKS}")
        if self.ablation.mode not in ("dummy", "no-notes"):
            raise InvalidConfig(f"unknown ablation mode {self.ablation.mode!r}")
        if self.eval.method is not None and self.eval.method not in DECODERS:
            raise InvalidConfig(f"unknown eval method {self.eval.method!r}, expected one of {DECODERS}")
        if self.eval.replicates < 1:
            raise InvalidConfig(f"replicates must be positive, got {self.eval.replicates}")
        self.model.validate()
        self.train.validate()
        self.decode.validate()
        self.regime.validate()
        self.ladder.validate()
        return self

    def to_dict(self) -> Dict[str, Any]:
        return OmegaConf.to_container(OmegaConf.structured(self), resolve=True)

    @property
    def eval_method(self) -> str:
        return self.eval.method or self.regime.method

    @property
    def manifest_hash(self) -> str:
        return manifest_hash(self.to_dict())


def _to_object(conf: Any) -> ExperimentConfig:
    cfg: ExperimentConfig = OmegaConf.to_object(conf)
    cfg.model.pos_offset_range = tuple(cfg.model.pos_offset_range)
    return cfg


def load_config(
    path: Optional[Union[str, UPath]] = None,
    overrides: Sequence[str] = (),
    **values: Any,
) -> ExperimentConfig:
    """Schema defaults, then the YAML file, then keyword values, then dotted overrides.

    Raises:
        InvalidConfig: unknown keys, wrong types or out-of-range values.

    Example:
        >>> cfg = load_config(overrides=["train.epochs=3", "task=algorithmic"])
        >>> cfg.train.epochs, cfg.task
        (3, 'algorithmic')
        >>> load_config(overrides=["train.epochz=3"])  # doctest: +ELLIPSIS
        Traceback (most recent call last):
        ...
        kedro_selfnotes.errors.InvalidConfig: Key 'epochz' not in ...
    """
    layers = [OmegaConf.structured(ExperimentConfig)]
    if path is not None:
        layers.append(OmegaConf.create(UPath(path).read_text()))
    if values:
        layers.append(OmegaConf.create(values))
    layers.append(OmegaConf.from_dotlist(list(overrides)))
    try:
        merged = OmegaConf.merge(*layers)
        cfg = _to_object(merged)
    except OmegaConfBaseException as error:
        raise InvalidConfig(str(error).splitlines()[0]) from error
    return cfg.validate()
