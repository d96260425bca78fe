"""Difficulty bucket tests."""

import pytest

from kedro_selfnotes.corpus.programs import make_program_sample
from kedro_selfnotes.errors import BucketViolation, InvalidConfig
from kedro_selfnotes.evalharness.splits import Bucket, SplitSpec, default_split, resolve_split


def test_default_buckets():
    """The default toy story split has one in-distribution bucket and two harder ones."""
    split = default_split("toy_story")
    assert [b.name for b in split.buckets] == ["1-2", "3*", "4*"]
    assert [b.ood for b in split.buckets] == [False, True, True]


def test_resolve_split_parses_labels():
    """Custom labels replace the default buckets."""
    split = resolve_split("algorithmic", "2-50,51-200*")
    assert split.buckets[1] == Bucket("51-200*", 51, 200)
    assert resolve_split("algorithmic", "default") == default_split("algorithmic")


def test_bad_label():
    """Unreadable labels are invalid."""
    with pytest.raises(InvalidConfig):
        Bucket.parse("a-b")


def test_partition_and_violation():
    """Samples go to their bucket; overlapping or missing buckets are violations."""
    sample = make_program_sample("algorithmic", "x = 1 ; x ++ ;".split(), "x")
    assert SplitSpec.parse("algorithmic", "1-2,3*").partition([sample]) == {"1-2": [0], "3*": []}
    with pytest.raises(BucketViolation):
        SplitSpec.parse("algorithmic", "1-2,2-3*").bucket_of(sample)
    with pytest.raises(BucketViolation):
        SplitSpec.parse("algorithmic", "3-4").bucket_of(sample)
