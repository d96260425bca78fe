"""Difficulty buckets of the evaluation splits."""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from kedro_selfnotes.corpus.sample import Sample, check_task
from kedro_selfnotes.errors import BucketViolation, InvalidConfig

_RANGE = re.compile(r"^(\d+)-(\d+)$")
_BOUND = re.compile(r"^(<=|>=)(\d+)$")
_SINGLE = re.compile(r"^(\d+)$")


@dataclass(frozen=True)
class Bucket:
    """Inclusive difficulty range; a trailing ``*`` in the name marks it out of distribution."""

    name: str
    low: int
    high: Optional[int] = None

    @property
    def ood(self) -> bool:
        return self.name.endswith("*")

    def contains(self, difficulty: int) -> bool:
        return self.low <= difficulty and (self.high is None or difficulty <= self.high)

    @classmethod
    def parse(cls, name: str) -> "Bucket":
        """Bucket from its label.

        Example:
            >>> Bucket.parse("101-200*")
            Bucket(name='101-200*', low=101, high=200)
            >>> Bucket.parse(">=81*").contains(150), Bucket.parse("<=80").contains(81)
            (True, False)
        """
        label = name.strip().rstrip("*")
        match = _RANGE.match(label)
        if match:
            return cls(name.strip(), int(match.group(1)), int(match.group(2)))
        match = _BOUND.match(label)
        if match:
            bound = int(match.group(2))
            if match.group(1) == "<=":
                return cls(name.strip(), 0, bound)
            return cls(name.strip(), bound, None)
        match = _SINGLE.match(label)
        if match:
            return cls(name.strip(), int(label), int(label))
        raise InvalidConfig(f"cannot read bucket {name!r}")


@dataclass(frozen=True)
class SplitSpec:
    """Buckets over one task's difficulty key."""

    task: str
    buckets: Tuple[Bucket, ...]

    def __post_init__(self):
        check_task(self.task)
        names = [bucket.name for bucket in self.buckets]
        assert len(set(names)) == len(names), f"duplicate bucket names {names}"

    @classmethod
    def parse(cls, task: str, labels: str) -> "SplitSpec":
        """Split from comma separated bucket labels.

        Example:
            >>> [b.name for b in SplitSpec.parse("toy_story", "1-2, 3*, 4*").buckets]
            ['1-2', '3*', '4*']
        """
        return cls(task, tuple(Bucket.parse(label) for label in labels.split(",") if label.strip()))

    def bucket_of(self, sample: Sample) -> Bucket:
        """The single bucket holding ``sample``.

        Raises:
            BucketViolation: the sample fits no bucket or several.
        """
        matches = [bucket for bucket in self.buckets if bucket.contains(sample.difficulty)]
        if len(matches) != 1:
            raise BucketViolation(
                f"{sample.task} sample with difficulty {sample.difficulty} fits "
                f"{[b.name for b in matches]} instead of exactly one bucket"
            )
        return matches[0]

    def partition(self, samples: Sequence[Sample]) -> Dict[str, List[int]]:
        """Sample indices per bucket name, every bucket present."""
        groups: Dict[str, List[int]] = {bucket.name: [] for bucket in self.buckets}
        for index, sample in enumerate(samples):
            groups[self.bucket_of(sample).name].append(index)
        return groups


DEFAULT_BUCKETS: Dict[str, str] = {
    "toy_story": "1-2,3*,4*",
    "algorithmic": "2-100,101-200*",
    "boolean_var": "3-8,9-19*",
    "chess_piece": "<=80,>=81*",
    "chess_move": "<=80,>=81*",
}
"""Training range first, then the harder test buckets."""


def default_split(task: str) -> SplitSpec:
    return SplitSpec.parse(task, DEFAULT_BUCKETS[check_task(task)])


def resolve_split(task: str, split: Optional[str] = None) -> SplitSpec:
    """``default`` or ``None`` gives the task's default buckets, anything else is parsed as labels."""
    if split is None or split == "default":
        return default_split(task)
    return SplitSpec.parse(task, split)
