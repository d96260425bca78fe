"""Toy story world, inference closure and sample generation tests."""

from typing import List

import pytest

from kedro_selfnotes.corpus.sample import splice_notes
from kedro_selfnotes.corpus.toy_story import (
    NOTE_START,
    ToyStoryConfig,
    answer_relation,
    at,
    gen_toy_story,
    has,
    inside,
    item_at,
    minimal_support_size,
    parse_sentence,
    relation_tokens,
    toy_story_answer,
    toy_story_closure,
    with_,
)
from kedro_selfnotes.errors import Ambiguous, InvalidConfig, Unanswerable


def _story_facts(context: List[str]):
    """Parse the stated facts back out of a context.

    Args:
        context (List[str]): story tokens

    Returns:
        List[Relation]: stated facts in story order
    """
    facts, sentence = [], []
    for token in context:
        sentence.append(token)
        if token == ".":
            facts.append(parse_sentence(sentence))
            sentence = []
    return facts


def test_closure_follows_containers():
    """Items inside a held container are held too, and located with the holder."""
    closed = toy_story_closure(
        [at("Mary", "farm"), has("Mary", "box"), inside("ball", "box")]
    )
    assert has("Mary", "ball") in closed
    assert item_at("ball", "farm") in closed
    assert item_at("box", "farm") in closed


def test_closure_is_a_fixpoint():
    """Closing a closed set adds nothing."""
    closed = toy_story_closure(
        [at("Alice", "park"), with_("Bob", "Alice"), has("Bob", "key"), inside("cup", "key")]
    )
    assert toy_story_closure(closed) == closed


def test_sentence_round_trip():
    """Every relation kind parses back from its sentence."""
    for rel in [
        at("Alice", "park"),
        with_("Bob", "Alice"),
        has("Bob", "key"),
        inside("ball", "box"),
        item_at("key", "park"),
    ]:
        assert parse_sentence(relation_tokens(rel)) == rel


def test_unanswerable_question():
    """A question about an unplaced entity has no answer."""
    with pytest.raises(Unanswerable):
        answer_relation([has("Bob", "key")], "Q: Where is Bob ?".split())


def test_ambiguous_question():
    """Two holders of the same item make the question ambiguous."""
    with pytest.raises(Ambiguous):
        answer_relation([has("Bob", "key"), has("Alice", "key")], "Q: Who has the key ?".split())


def test_hand_written_sample(toy_samples):
    """The fixture samples carry their known answers and hop counts.

    Args:
        toy_samples (List[Sample]): hand-written samples
    """
    first, second = toy_samples
    assert " ".join(first.answer) == "the key is at the park ."
    assert first.difficulty == 3
    assert " ".join(second.answer) == "Mary has the key ."
    assert [note.pos for note in second.notes] == [12, 19]


@pytest.mark.parametrize("hops", [1, 2, 3, 4])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_generated_hops_are_exact(hops: int, seed: int):
    """Generated questions need exactly the requested number of facts.

    Args:
        hops (int): requested hop count
        seed (int): generation seed
    """
    sample = gen_toy_story(ToyStoryConfig(hops=hops), seed)
    facts = _story_facts(list(sample.context))
    target = answer_relation(facts, sample.question)
    assert sample.difficulty == hops
    assert minimal_support_size(facts, target) == hops
    assert list(sample.answer) == toy_story_answer(facts, sample.question)


def test_generation_is_deterministic():
    """The same seed yields the same sample."""
    cfg = ToyStoryConfig(hops=2)
    assert gen_toy_story(cfg, 7) == gen_toy_story(cfg, 7)


def test_notes_are_sub_questions():
    """Every gold note is a sub-question with its answer sentence."""
    sample = gen_toy_story(ToyStoryConfig(hops=2), 3)
    for note in sample.notes:
        assert note.tokens[0] == NOTE_START
        assert note.tokens[-1] == "."
        assert "?" in note.tokens
    enriched = splice_notes(sample.context, sample.notes)
    assert len(enriched) == len(sample.context) + sample.note_token_count()


@pytest.mark.parametrize(
    "cfg",
    [
        ToyStoryConfig(hops=0),
        ToyStoryConfig(hops=5, num_sentences=4),
        ToyStoryConfig(num_people=0),
        ToyStoryConfig(num_places=1_000),
    ],
)
def test_invalid_story_configs(cfg: ToyStoryConfig):
    """Out-of-range story settings raise ``InvalidConfig``.

    Args:
        cfg (ToyStoryConfig): story settings with one bad value
    """
    with pytest.raises(InvalidConfig):
        gen_toy_story(cfg, 0)
