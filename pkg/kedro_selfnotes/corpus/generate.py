"""Dataset splits: per-sample seeds, parallel generation and statistics."""

import logging
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

from kedro_selfnotes.corpus.chess_games import ChessGame, make_chess_sample
from kedro_selfnotes.corpus.programs import (
    AlgorithmicConfig,
    BooleanConfig,
    gen_algorithmic,
    gen_boolean,
)
from kedro_selfnotes.corpus.sample import Sample, check_task
from kedro_selfnotes.corpus.toy_story import ToyStoryConfig, gen_toy_story
from kedro_selfnotes.errors import GenerationExhausted, InvalidConfig
from kedro_selfnotes.utils.constants import MAX_WORKERS
from kedro_selfnotes.utils.hashing import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitRequest:
    """``count`` samples whose difficulty is drawn uniformly from [low, high]."""

    count: int
    low: int
    high: int

    def __post_init__(self):
        if self.count < 0:
            raise InvalidConfig(f"count must be non-negative, got {self.count}")
        if not 1 <= self.low <= self.high:
            raise InvalidConfig(f"bad difficulty range [{self.low}, {self.high}]")


DEFAULT_SPLITS: Dict[str, Dict[str, SplitRequest]] = {
    "toy_story": {
        "train": SplitRequest(10_000, 1, 2),
        "valid": SplitRequest(1_000, 1, 2),
        "test": SplitRequest(1_000, 1, 4),
    },
    "algorithmic": {
        "train": SplitRequest(10_000, 2, 100),
        "valid": SplitRequest(1_000, 2, 100),
        "test": SplitRequest(1_000, 2, 200),
    },
    "boolean_var": {
        "train": SplitRequest(10_000, 3, 8),
        "valid": SplitRequest(1_000, 3, 8),
        "test": SplitRequest(1_000, 3, 19),
    },
    "chess_piece": {
        "train": SplitRequest(200_000, 1, 80),
        "valid": SplitRequest(1_000, 1, 80),
        "test": SplitRequest(1_000, 1, 200),
    },
    "chess_move": {
        "train": SplitRequest(200_000, 1, 80),
        "valid": SplitRequest(1_000, 1, 80),
        "test": SplitRequest(1_000, 1, 200),
    },
}
"""Split sizes and difficulty ranges of the dataset-statistics table."""


@dataclass(frozen=True)
class TaskConfigs:
    """Per-family generator settings; the difficulty field is set per sample."""

    toy_story: ToyStoryConfig = field(default_factory=ToyStoryConfig)
    algorithmic: AlgorithmicConfig = field(default_factory=AlgorithmicConfig)
    boolean_var: BooleanConfig = field(default_factory=BooleanConfig)


def _chess_sample(
    games: Sequence[ChessGame], task: str, low: int, high: int, rng: random.Random, seed: int
) -> Sample:
    playable = [game for game in games if len(game.moves) >= low]
    if not playable:
        raise GenerationExhausted(f"no game has at least {low} moves")
    game = rng.choice(playable)
    cut = rng.randint(low, min(high, len(game.moves)))
    return make_chess_sample(game, cut, task, seed=seed)


def generate_sample(
    task: str,
    request: SplitRequest,
    seed: int,
    configs: TaskConfigs = TaskConfigs(),
    games: Optional[Sequence[ChessGame]] = None,
) -> Sample:
    """One sample of ``task`` with a difficulty drawn from ``request``."""
    rng = random.Random(seed)
    if task.startswith("chess"):
        if not games:
            raise InvalidConfig("chess generation needs ingested games")
        return _chess_sample(games, task, request.low, request.high, rng, seed)
    difficulty = rng.randint(request.low, request.high)
    if task == "toy_story":
        cfg = configs.toy_story
        cfg = replace(cfg, hops=difficulty, num_sentences=max(cfg.num_sentences, difficulty))
        return gen_toy_story(cfg, seed)
    if task == "algorithmic":
        return gen_algorithmic(replace(configs.algorithmic, num_statements=difficulty), seed)
    return gen_boolean(replace(configs.boolean_var, num_statements=difficulty), seed)


def generate_split(
    task: str,
    split: str,
    request: SplitRequest,
    seed: int,
    configs: TaskConfigs = TaskConfigs(),
    games: Optional[Sequence[ChessGame]] = None,
) -> List[Sample]:
    """Generate a split; sample ``i`` uses the seed derived from (seed, split, i).

    Example:
        >>> samples = generate_split("boolean_var", "train", SplitRequest(3, 3, 5), seed=0)
        >>> [3 <= s.difficulty <= 5 for s in samples]
        [True, True, True]
    """
    check_task(task)

    def _one(index: int) -> Sample:
        return generate_sample(task, request, derive_seed(seed, split, index), configs, games)

    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as pool:
        samples = list(pool.map(_one, range(request.count)))
    logger.info(f"Generated {len(samples)} {task} samples for split {split}")
    return samples


def split_stats(samples: Sequence[Sample]) -> Dict[str, Any]:
    """Difficulty histogram and note density of a split.

    Example:
        >>> pprint(split_stats([]))
        {'context_tokens_per_sample': 0.0,
         'count': 0,
         'difficulty_histogram': {},
         'note_tokens_per_sample': 0.0,
         'notes_per_sample': 0.0}
    """
    histogram = Counter(sample.difficulty for sample in samples)
    count = len(samples)
    return {
        "count": count,
        "difficulty_histogram": {str(k): histogram[k] for k in sorted(histogram)},
        "notes_per_sample": sum(len(s.notes) for s in samples) / count if count else 0.0,
        "note_tokens_per_sample": (
            sum(s.note_token_count() for s in samples) / count if count else 0.0
        ),
        "context_tokens_per_sample": (
            sum(len(s.context) for s in samples) / count if count else 0.0
        ),
    }
