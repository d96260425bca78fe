"""Scratchpad target and dummy insertion tests."""

import pytest

from kedro_selfnotes.corpus.sample import DUMMY
from kedro_selfnotes.corpus.targets import (
    build_scratchpad_target,
    dummy_count,
    insert_dummies,
    unit_boundaries,
)


def test_copy_style_scratchpad(program_samples):
    """Program scratchpads copy the whole context with notes spliced in.

    Args:
        program_samples (List[Sample]): hand-written samples
    """
    sample = program_samples[0]
    assert " ".join(build_scratchpad_target(sample)) == (
        "[ x = 1 ; x ++ ; print x x = 2 ; ] x = 2 ;"
    )


def test_notes_only_scratchpad(toy_samples):
    """Toy story scratchpads hold the notes only.

    Args:
        toy_samples (List[Sample]): hand-written samples
    """
    sample = toy_samples[1]
    target = build_scratchpad_target(sample)
    body = target[1 : target.index("]")]
    assert body == [tok for note in sample.notes for tok in note.tokens]
    assert target[target.index("]") + 1 :] == list(sample.answer)


@pytest.mark.parametrize("placement", ["naive", "note_positions", "post_context"])
def test_dummies_replace_notes(toy_samples, placement: str):
    """Dummy samples carry no notes and keep the context text.

    Args:
        toy_samples (List[Sample]): hand-written samples
        placement (str): dummy placement
    """
    sample = toy_samples[1]
    dummied = insert_dummies(sample, placement, count_per_site=2)
    assert dummied.notes == ()
    assert [tok for tok in dummied.context if tok != DUMMY] == list(sample.context)
    assert dummied.answer == sample.answer


def test_dummy_counts(toy_samples):
    """Note-position and post-context placements insert the same number of dummies.

    Args:
        toy_samples (List[Sample]): hand-written samples
    """
    sample = toy_samples[1]
    assert dummy_count(insert_dummies(sample, "note_positions", 3)) == 3 * len(sample.notes)
    assert dummy_count(insert_dummies(sample, "post_context", 3)) == 3 * len(sample.notes)
    sentences = len(unit_boundaries(sample.task, sample.context))
    assert dummy_count(insert_dummies(sample, "naive", 1)) == sentences


def test_unknown_placement(toy_samples):
    """Unknown placements are rejected.

    Args:
        toy_samples (List[Sample]): hand-written samples
    """
    with pytest.raises(ValueError):
        insert_dummies(toy_samples[0], "everywhere")
