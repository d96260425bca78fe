"""Toy-Story worlds: relations, forward inference and k-hop questions."""

import logging
import random
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import (
    DefaultDict,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from kedro_selfnotes.corpus.sample import NoteAnnotation, Sample
from kedro_selfnotes.errors import Ambiguous, GenerationExhausted, InvalidConfig, Unanswerable
from kedro_selfnotes.utils.constants import MAX_REROLLS
from kedro_selfnotes.utils.hashing import derive_seed
from kedro_selfnotes.utils.typing import TokenLike

logger = logging.getLogger(__name__)

PERSON_AT = "person_at_place"
PERSON_WITH = "person_with_person"
PERSON_HAS = "person_has_item"
ITEM_INSIDE = "item_inside_item"
ITEM_AT = "item_at_place"
KINDS = (PERSON_AT, PERSON_WITH, PERSON_HAS, ITEM_INSIDE, ITEM_AT)

PEOPLE = ("Alice", "Bob", "Charlie", "Daniel", "Emma", "Frank", "Grace", "John", "Mary", "Sandra")
ITEMS = ("apple", "bag", "ball", "banana", "basket", "book", "box", "cup", "key", "suitcase")
PLACES = ("bridge", "farm", "garden", "office", "park", "school", "station", "store")

QUESTION_MARK = "?"
SENTENCE_END = "."
QUESTION_START = "Q:"
NOTE_START = "SQ:"


@dataclass(frozen=True, order=True)
class Relation:
    """A typed relation such as ``person_at_place(Alice, park)``."""

    kind: str
    subject: str
    object: str

    def __post_init__(self):
        assert self.kind in KINDS, f"unknown relation kind {self.kind!r}"

    def __str__(self) -> str:
        return f"{self.kind}({self.subject},{self.object})"


def at(person: str, place: str) -> Relation:
    return Relation(PERSON_AT, person, place)


def with_(person: str, other: str) -> Relation:
    return Relation(PERSON_WITH, person, other)


def has(person: str, item: str) -> Relation:
    return Relation(PERSON_HAS, person, item)


def inside(item: str, container: str) -> Relation:
    return Relation(ITEM_INSIDE, item, container)


def item_at(item: str, place: str) -> Relation:
    return Relation(ITEM_AT, item, place)


@dataclass(frozen=True)
class ToyStoryConfig:
    num_people: int = 5
    num_items: int = 5
    num_places: int = 4
    num_sentences: int = 12
    hops: int = 1


@dataclass
class ToyWorld:
    """Entities and the stated facts, in story order."""

    people: Tuple[str, ...]
    items: Tuple[str, ...]
    places: Tuple[str, ...]
    facts: List[Relation] = field(default_factory=list)

    def __post_init__(self):
        overlap = (
            set(self.people) & set(self.items)
            | set(self.people) & set(self.places)
            | set(self.items) & set(self.places)
        )
        assert not overlap, f"entities in two categories: {sorted(overlap)}"


def _derivations(
    known: Iterable[Relation],
) -> Iterator[Tuple[Relation, Tuple[Relation, Relation]]]:
    """Every single-rule conclusion from ``known`` with its two premises."""
    by_kind: DefaultDict[str, List[Relation]] = defaultdict(list)
    by_subject: DefaultDict[Tuple[str, str], List[Relation]] = defaultdict(list)
    by_object: DefaultDict[Tuple[str, str], List[Relation]] = defaultdict(list)
    for rel in known:
        by_kind[rel.kind].append(rel)
        by_subject[rel.kind, rel.subject].append(rel)
        by_object[rel.kind, rel.object].append(rel)

    for rel in by_kind[PERSON_WITH]:
        for loc in by_subject[PERSON_AT, rel.object]:
            yield at(rel.subject, loc.object), (rel, loc)
    for rel in by_kind[PERSON_HAS]:
        for loc in by_subject[PERSON_AT, rel.subject]:
            yield item_at(rel.object, loc.object), (rel, loc)
    for rel in by_kind[ITEM_INSIDE]:
        for holder in by_object[PERSON_HAS, rel.object]:
            yield has(holder.subject, rel.subject), (rel, holder)
        for holder in by_object[PERSON_HAS, rel.subject]:
            yield has(holder.subject, rel.object), (rel, holder)
        for loc in by_subject[ITEM_AT, rel.object]:
            yield item_at(rel.subject, loc.object), (rel, loc)


def _step(known: Set[Relation]) -> Set[Relation]:
    return {conclusion for conclusion, _ in _derivations(known)} - known


def toy_story_closure(facts: Iterable[Relation]) -> FrozenSet[Relation]:
    """Least fixpoint of the inference rules.

    Args:
        facts (Iterable[Relation]): stated facts

    Returns:
        FrozenSet[Relation]: the facts and everything they entail

    Example:
        >>> sorted(map(str, toy_story_closure({at("Alice", "park"), with_("Bob", "Alice")})))
        ['person_at_place(Alice,park)', 'person_at_place(Bob,park)', 'person_with_person(Bob,Alice)']
        >>> toy_story_closure(set())
        frozenset()
    """
    known = set(facts)
    new = _step(known)
    while new:
        known |= new
        new = _step(known)
    return frozenset(known)


def derive_new(
    closed: FrozenSet[Relation], fact: Relation
) -> Tuple[List[Relation], FrozenSet[Relation]]:
    """Relations newly inferable once ``fact`` joins the fixpoint ``closed``.

    The result is ordered by inference round, then kind, subject and object;
    this is the order notes are written in.

    Returns:
        Tuple[List[Relation], FrozenSet[Relation]]: new relations and the
        updated fixpoint.
    """
    known = set(closed) | {fact}
    ordered: List[Relation] = []
    new = _step(known)
    while new:
        ordered.extend(sorted(new))
        known |= new
        new = _step(known)
    return ordered, frozenset(known)


def support_sizes(facts: Iterable[Relation]) -> Dict[Relation, int]:
    """Size of the smallest fact set found deriving each relation.

    Exact when every relation has one derivation, an upper bound otherwise.

    Args:
        facts (Iterable[Relation]): stated facts

    Returns:
        Dict[Relation, int]: support size of every entailed relation
    """
    supports: Dict[Relation, FrozenSet[Relation]] = {
        fact: frozenset([fact]) for fact in facts
    }
    changed = True
    while changed:
        changed = False
        for conclusion, (left, right) in list(_derivations(list(supports))):
            candidate = supports[left] | supports[right]
            current = supports.get(conclusion)
            if current is None or len(candidate) < len(current):
                supports[conclusion] = candidate
                changed = True
    return {rel: len(support) for rel, support in supports.items()}


def entailed_by_subset(facts: Sequence[Relation], target: Relation, size: int) -> bool:
    """Whether some ``size``-subset of ``facts`` entails ``target``.

    Args:
        facts (Sequence[Relation]): stated facts
        target (Relation): relation to derive
        size (int): subset size, capped at ``len(facts)``

    Returns:
        bool: True when one subset's closure holds ``target``
    """
    if size <= 0:
        return False
    return any(
        target in toy_story_closure(subset)
        for subset in combinations(facts, min(size, len(facts)))
    )


def minimal_support_size(
    facts: Sequence[Relation], target: Relation, limit: Optional[int] = None
) -> Optional[int]:
    """Exhaustive search for the smallest fact subset entailing ``target``.

    Args:
        facts (Sequence[Relation]): stated facts
        target (Relation): relation to derive
        limit (Optional[int]): largest subset size tried

    Returns:
        Optional[int]: the smallest size, None when no subset up to the
        limit entails ``target``

    Example:
        >>> facts = [at("Alice", "park"), with_("Bob", "Alice"), has("Bob", "key")]
        >>> minimal_support_size(facts, item_at("key", "park"))
        3
        >>> minimal_support_size(facts, at("Alice", "farm")) is None
        True
    """
    upper = len(facts) if limit is None else min(limit, len(facts))
    for size in range(1, upper + 1):
        if entailed_by_subset(facts, target, size):
            return size
    return None


def relation_tokens(rel: Relation) -> List[str]:
    """Surface sentence of a relation.

    Example:
        >>> " ".join(relation_tokens(inside("ball", "box")))
        'the ball is inside the box .'
    """
    templates = {
        PERSON_AT: [rel.subject, "is", "at", "the", rel.object],
        PERSON_WITH: [rel.subject, "is", "with", rel.object],
        PERSON_HAS: [rel.subject, "has", "the", rel.object],
        ITEM_INSIDE: ["the", rel.subject, "is", "inside", "the", rel.object],
        ITEM_AT: ["the", rel.subject, "is", "at", "the", rel.object],
    }
    return templates[rel.kind] + [SENTENCE_END]


def parse_sentence(tokens: TokenLike) -> Relation:
    """Inverse of :func:`relation_tokens`.

    Example:
        >>> str(parse_sentence("Bob is with Alice .".split()))
        'person_with_person(Bob,Alice)'
    """
    words = list(tokens)
    if words and words[-1] == SENTENCE_END:
        words = words[:-1]
    shapes = {
        ("is", "at", "the"): PERSON_AT,
        ("is", "with"): PERSON_WITH,
        ("has", "the"): PERSON_HAS,
    }
    if words[:1] == ["the"] and len(words) == 6:
        kind = ITEM_INSIDE if words[3] == "inside" else ITEM_AT
        return Relation(kind, words[1], words[5])
    for shape, kind in shapes.items():
        if tuple(words[1:-1]) == shape:
            return Relation(kind, words[0], words[-1])
    raise ValueError(f"not a story sentence: {' '.join(tokens)}")


def question_tokens(rel: Relation, marker: str = QUESTION_START) -> List[str]:
    """Question whose answer is ``rel``.

    Args:
        rel (Relation): a ``person_has_item``, ``person_at_place`` or
            ``item_at_place`` relation
        marker (str): ``Q:`` for the final question, ``SQ:`` inside notes

    Returns:
        List[str]: the question tokens, ending with ``?``

    Example:
        >>> " ".join(question_tokens(has("Mary", "key")))
        'Q: Who has the key ?'
        >>> " ".join(question_tokens(at("Bob", "park"), NOTE_START))
        'SQ: Where is Bob ?'
    """
    if rel.kind == PERSON_HAS:
        body = ["Who", "has", "the", rel.object]
    elif rel.kind == PERSON_AT:
        body = ["Where", "is", rel.subject]
    elif rel.kind == ITEM_AT:
        body = ["Where", "is", "the", rel.subject]
    else:
        raise ValueError(f"no question asks for {rel.kind}")
    return [marker] + body + [QUESTION_MARK]


def note_tokens(rel: Relation) -> List[str]:
    """A sub-question followed by its answer sentence."""
    return question_tokens(rel, NOTE_START) + relation_tokens(rel)


def parse_question(question: TokenLike) -> Tuple[str, str]:
    """Read ``(form, entity)`` off a question, ``form`` is ``where`` or ``who_has``.

    Example:
        >>> parse_question("Q: Where is the key ?".split())
        ('where', 'key')
    """
    words = [w for w in question if w not in (QUESTION_START, NOTE_START, QUESTION_MARK)]
    if words[:2] == ["Where", "is"]:
        return "where", words[-1]
    if words[:3] == ["Who", "has", "the"] and len(words) == 4:
        return "who_has", words[-1]
    raise ValueError(f"unsupported question: {' '.join(question)}")


def _matching(closed: Iterable[Relation], form: str, entity: str) -> List[Relation]:
    if form == "where":
        return sorted(
            rel for rel in closed if rel.kind in (PERSON_AT, ITEM_AT) and rel.subject == entity
        )
    return sorted(rel for rel in closed if rel.kind == PERSON_HAS and rel.object == entity)


def answer_relation(facts: Iterable[Relation], question: TokenLike) -> Relation:
    """The single relation answering ``question``.

    Args:
        facts (Iterable[Relation]): stated facts
        question (TokenLike): a ``Where is`` or ``Who has`` question

    Returns:
        Relation: the entailed relation the question asks for

    Raises:
        Unanswerable: nothing entailed answers the question.
        Ambiguous: more than one relation answers it.
    """
    form, entity = parse_question(question)
    matches = _matching(toy_story_closure(facts), form, entity)
    if not matches:
        raise Unanswerable(f"nothing answers {' '.join(question)!r}")
    if len(matches) > 1:
        raise Ambiguous(
            f"{' '.join(question)!r} has {len(matches)} answers: {list(map(str, matches))}"
        )
    return matches[0]


def toy_story_answer(facts: Iterable[Relation], question: TokenLike) -> List[str]:
    """Answer sentence read off the closure of ``facts``.

    Example:
        >>> facts = {at("Alice", "park"), with_("Bob", "Alice"), has("Bob", "key")}
        >>> " ".join(toy_story_answer(facts, "Q: Where is the key ?".split()))
        'the key is at the park .'
    """
    return relation_tokens(answer_relation(facts, question))


class StoryTracker:
    """Incremental closure over a story told one sentence at a time."""

    def __init__(self):
        self.stated: List[Relation] = []
        self.closed: FrozenSet[Relation] = frozenset()

    def tell(self, fact: Relation) -> List[Relation]:
        """Add a stated fact and return the newly inferable relations."""
        self.stated.append(fact)
        if fact in self.closed:
            return []
        new, self.closed = derive_new(self.closed, fact)
        return new

    def copy(self) -> "StoryTracker":
        twin = StoryTracker()
        twin.stated = list(self.stated)
        twin.closed = self.closed
        return twin


def annotate_story(facts: Sequence[Relation]) -> Tuple[List[str], List[NoteAnnotation]]:
    """Context tokens of a story plus its gold notes.

    Each sentence is followed by one note per relation it makes newly
    inferable.

    Args:
        facts (Sequence[Relation]): story facts in order

    Returns:
        Tuple[List[str], List[NoteAnnotation]]: context tokens and the notes
        positioned right after their sentence

    Example:
        >>> story = [has("Mary", "ball"), inside("ball", "box"), inside("key", "box")]
        >>> context, notes = annotate_story(story)
        >>> [(n.pos, " ".join(n.tokens)) for n in notes]
        [(12, 'SQ: Who has the box ? Mary has the box .'), (19, 'SQ: Who has the key ? Mary has the key .')]
    """
    tracker = StoryTracker()
    context: List[str] = []
    notes: List[NoteAnnotation] = []
    for fact in facts:
        context.extend(relation_tokens(fact))
        for rel in tracker.tell(fact):
            notes.append(NoteAnnotation(len(context), tuple(note_tokens(rel))))
    return context, notes


def make_toy_story_sample(
    facts: Sequence[Relation], question: TokenLike, seed: int = 0, hops: Optional[int] = None
) -> Sample:
    """Build a sample from an explicit story; ``hops`` defaults to the exact minimum.

    Args:
        facts (Sequence[Relation]): story facts in order
        question (TokenLike): final question
        seed (int): seed recorded on the sample
        hops (Optional[int]): known hop count

    Returns:
        Sample: a ``toy_story`` sample with its gold notes
    """
    target = answer_relation(facts, question)
    if hops is None:
        hops = minimal_support_size(facts, target)
    context, notes = annotate_story(facts)
    return Sample(
        task="toy_story",
        context=tuple(context),
        question=tuple(question),
        answer=tuple(relation_tokens(target)),
        notes=tuple(notes),
        meta={"hops": int(hops or 0)},
        seed=seed,
    )


class _WorldBuilder:
    """Samples stated facts that keep every relation single-valued."""

    def __init__(self, cfg: ToyStoryConfig, rng: random.Random):
        self.rng = rng
        self.world = ToyWorld(
            people=tuple(rng.sample(PEOPLE, cfg.num_people)),
            items=tuple(rng.sample(ITEMS, cfg.num_items)),
            places=tuple(rng.sample(PLACES, cfg.num_places)),
        )
        self.located: Set[str] = set()
        self.follows: Dict[str, str] = {}
        self.contained: Set[str] = set()
        self.group: Dict[str, str] = {item: item for item in self.world.items}
        self.anchors: Dict[str, int] = {item: 0 for item in self.world.items}

    def _root(self, item: str) -> str:
        while self.group[item] != item:
            item = self.group[item]
        return item

    def _reaches(self, start: str, target: str) -> bool:
        while start in self.follows:
            start = self.follows[start]
            if start == target:
                return True
        return start == target

    def options(self) -> Dict[str, List[Relation]]:
        w = self.world
        free_people = [p for p in w.people if p not in self.located]
        free_items = [i for i in w.items if self.anchors[self._root(i)] == 0]
        return {
            PERSON_AT: [at(p, place) for p in free_people for place in w.places],
            PERSON_WITH: [
                with_(p, q)
                for p in free_people
                for q in w.people
                if q != p and not self._reaches(q, p)
            ],
            PERSON_HAS: [has(p, i) for p in w.people for i in free_items],
            ITEM_INSIDE: [
                inside(i, c)
                for i in w.items
                if i not in self.contained
                for c in w.items
                if self._root(c) != self._root(i)
                and self.anchors[self._root(c)] + self.anchors[self._root(i)] <= 1
            ],
            ITEM_AT: [item_at(i, place) for i in free_items for place in w.places],
        }

    def add(self, rel: Relation):
        if rel.kind in (PERSON_AT, PERSON_WITH):
            self.located.add(rel.subject)
            if rel.kind == PERSON_WITH:
                self.follows[rel.subject] = rel.object
        elif rel.kind == ITEM_INSIDE:
            child, parent = self._root(rel.subject), self._root(rel.object)
            self.contained.add(rel.subject)
            self.group[child] = parent
            self.anchors[parent] += self.anchors.pop(child)
        else:
            self.anchors[self._root(rel.subject if rel.kind == ITEM_AT else rel.object)] += 1
        self.world.facts.append(rel)

    def build(self, num_sentences: int) -> ToyWorld:
        for _ in range(num_sentences):
            choices = {kind: rels for kind, rels in self.options().items() if rels}
            if not choices:
                break
            kind = self.rng.choice(sorted(choices))
            self.add(self.rng.choice(choices[kind]))
        return self.world


def sample_world(cfg: ToyStoryConfig, rng: random.Random) -> ToyWorld:
    """Random consistent world with up to ``cfg.num_sentences`` stated facts."""
    return _WorldBuilder(cfg, rng).build(cfg.num_sentences)


def _k_hop_candidates(world: ToyWorld, hops: int) -> List[Tuple[Relation, List[str]]]:
    facts = world.facts
    sizes = support_sizes(facts)
    candidates = []
    for rel, size in sorted(sizes.items()):
        if size != hops or rel.kind not in (PERSON_AT, PERSON_HAS, ITEM_AT):
            continue
        question = question_tokens(rel)
        try:
            answer_relation(facts, question)
        except (Ambiguous, Unanswerable):
            continue
        if entailed_by_subset(facts, rel, hops - 1):
            continue
        candidates.append((rel, question))
    return candidates


def _check_config(cfg: ToyStoryConfig):
    if cfg.hops < 1:
        raise InvalidConfig(f"hops must be positive, got {cfg.hops}")
    if cfg.hops > cfg.num_sentences:
        raise InvalidConfig(f"hops={cfg.hops} exceeds num_sentences={cfg.num_sentences}")
    for name, size, pool in (
        ("num_people", cfg.num_people, PEOPLE),
        ("num_items", cfg.num_items, ITEMS),
        ("num_places", cfg.num_places, PLACES),
    ):
        if not 1 <= size <= len(pool):
            raise InvalidConfig(f"{name} must lie in [1, {len(pool)}], got {size}")


def gen_toy_story(cfg: ToyStoryConfig, seed: int) -> Sample:
    """Generate a story whose question needs exactly ``cfg.hops`` facts.

    Worlds are rerolled with derived seeds until one offers a question of the
    requested hop count.

    Args:
        cfg (ToyStoryConfig): entity counts, story length and hop count
        seed (int): generation seed

    Returns:
        Sample: a story whose question needs exactly ``cfg.hops`` facts

    Raises:
        InvalidConfig: out-of-range settings.
        GenerationExhausted: after ``MAX_REROLLS`` worlds without a candidate.
    """
    _check_config(cfg)
    for attempt in range(MAX_REROLLS):
        rng = random.Random(derive_seed("toy_story", seed, attempt))
        world = sample_world(cfg, rng)
        candidates = _k_hop_candidates(world, cfg.hops)
        if not candidates:
            continue
        if attempt:
            logger.debug(f"seed {seed}: {attempt} rerolls for a {cfg.hops}-hop question")
        _, question = rng.choice(candidates)
        return make_toy_story_sample(world.facts, question, seed=seed, hops=cfg.hops)
    raise GenerationExhausted(
        f"no {cfg.hops}-hop question in {MAX_REROLLS} worlds for seed {seed}"
    )
