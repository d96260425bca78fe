"""Exact-match evaluation per difficulty bucket."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from kedro_selfnotes.corpus.sample import DUMMY, EOS, Sample
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.notectl.decoding import DecodeResult, decode
from kedro_selfnotes.textmodel.transformer import LanguageModel
from kedro_selfnotes.evalharness.splits import SplitSpec
from kedro_selfnotes.utils.constants import MAX_WORKERS
from kedro_selfnotes.utils.typing import TokenLike

logger = logging.getLogger(__name__)


def _strip_terminator(tokens: TokenLike) -> List[str]:
    tokens = list(tokens)
    return tokens[:-1] if tokens and tokens[-1] == EOS else tokens


def exact_match(predicted: TokenLike, gold: TokenLike) -> bool:
    """Token equality after removing a trailing ``<eos>``; a dummy token never matches.

    Example:
        >>> exact_match("e = 5 ;".split(), "e = 5 ;".split())
        True
        >>> exact_match("e = 5 ;".split(), "e = 4 ;".split())
        False
        >>> exact_match("e = 5".split(), "e = 5 ; <eos>".split())
        False
    """
    predicted = _strip_terminator(predicted)
    if DUMMY in predicted:
        return False
    return predicted == _strip_terminator(gold)


def is_correct(result: DecodeResult, sample: Sample) -> bool:
    """Terminated, in budget and exactly the gold answer."""
    return result.terminated and not result.overflow and exact_match(result.answer, sample.answer)


@dataclass
class BucketResult:
    """Counts of one bucket."""

    bucket: str
    n: int = 0
    correct: int = 0
    overflow: int = 0
    note_tokens: int = 0

    @property
    def accuracy(self) -> Optional[float]:
        """``None`` for an empty bucket."""
        return self.correct / self.n if self.n else None

    @property
    def overflow_rate(self) -> Optional[float]:
        return self.overflow / self.n if self.n else None

    @property
    def mean_note_tokens(self) -> Optional[float]:
        return self.note_tokens / self.n if self.n else None

    def add(self, result: DecodeResult, correct: bool):
        self.n += 1
        self.correct += int(correct)
        self.overflow += int(result.overflow)
        self.note_tokens += result.note_tokens


@dataclass
class EvalReport:
    """Bucket results of one method on one dataset."""

    task: str
    method: str
    buckets: List[BucketResult]
    manifest_hash: str = ""
    seed: int = 0
    traces: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return sum(bucket.n for bucket in self.buckets)

    @property
    def accuracy(self) -> Optional[float]:
        """Accuracy over every bucket."""
        total = self.n
        return sum(bucket.correct for bucket in self.buckets) / total if total else None

    def bucket(self, name: str) -> BucketResult:
        for bucket in self.buckets:
            if bucket.bucket == name:
                return bucket
        raise KeyError(name)

    def to_frame(self) -> pd.DataFrame:
        """One row per bucket, undefined values as NaN."""
        rows = [
            {
                "task": self.task,
                "bucket": bucket.bucket,
                "method": self.method,
                "seed": self.seed,
                "n": bucket.n,
                "accuracy": bucket.accuracy,
                "overflow_rate": bucket.overflow_rate,
                "mean_note_tokens": bucket.mean_note_tokens,
                "manifest_hash": self.manifest_hash,
            }
            for bucket in self.buckets
        ]
        return pd.DataFrame(rows).astype(
            {"accuracy": float, "overflow_rate": float, "mean_note_tokens": float}
        )


def evaluate(
    model: LanguageModel,
    samples: Sequence[Sample],
    method: str,
    dc: DecodeConfig,
    split: SplitSpec,
    manifest_hash: str = "",
    seed: int = 0,
    keep_traces: bool = False,
    workers: int = MAX_WORKERS,
) -> EvalReport:
    """Decode every sample with ``method`` and count exact matches per bucket.

    Raises:
        BucketViolation: a sample fits zero or several buckets.
    """
    groups = split.partition(samples)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda sample: decode(model, sample, method, dc), samples))
    buckets = []
    for bucket in split.buckets:
        counts = BucketResult(bucket.name)
        for index in groups[bucket.name]:
            counts.add(results[index], is_correct(results[index], samples[index]))
        buckets.append(counts)
        accuracy = "n/a" if counts.accuracy is None else f"{counts.accuracy:.3f}"
        logger.info(f"{split.task} {method} bucket {bucket.name}: {accuracy} over {counts.n}")
    traces = [result.to_trace(index) for index, result in enumerate(results)] if keep_traces else []
    return EvalReport(split.task, method, buckets, manifest_hash, seed, traces)
