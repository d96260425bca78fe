"""Vanilla, Scratchpad and Self-Notes decoding controllers."""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import torch

from kedro_selfnotes.corpus.sample import BOS, CLOSE_BRACKET, OPEN_BRACKET, Sample
from kedro_selfnotes.errors import InvalidConfig
from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.notectl.enriched import GENERATED, GOLD, EnrichedContext
from kedro_selfnotes.textmodel.transformer import LanguageModel, next_token_dist
from kedro_selfnotes.utils.iterable import contains_run
from kedro_selfnotes.utils.typing import TokenLike

logger = logging.getLogger(__name__)

QUESTION_MARK = "?"
DECODERS = ("vanilla", "scratchpad", "selfnotes", "gold_notes", "no_notes")


@dataclass
class TriggerEvent:
    """A fired note trigger: where, how likely a start token was, and what came of it."""

    position: int
    start_mass: float
    boosted_mass: float
    token: str
    inserted: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "position": self.position,
            "start_mass": self.start_mass,
            "boosted_mass": self.boosted_mass,
            "token": self.token,
            "inserted": self.inserted,
        }


@dataclass
class DecodeResult:
    """Answer of one decode plus everything the trace records."""

    method: str
    answer: List[str] = field(default_factory=list)
    terminated: bool = False
    overflow: bool = False
    enriched: Optional[EnrichedContext] = None
    scratchpad: List[str] = field(default_factory=list)
    confidence: Optional[float] = None
    triggers: List[TriggerEvent] = field(default_factory=list)

    @property
    def note_tokens(self) -> int:
        return self.enriched.note_token_count() if self.enriched is not None else 0

    def to_trace(self, sample_id: int) -> Dict[str, Any]:
        enriched = self.enriched
        context_tokens = len(enriched.context_tokens()) if enriched is not None else 0
        return {
            "id": sample_id,
            "method": self.method,
            "segments": enriched.to_dict() if enriched is not None else [],
            "scratchpad": list(self.scratchpad),
            "answer": list(self.answer),
            "terminated": self.terminated,
            "overflow": self.overflow,
            "confidence": self.confidence,
            "token_budget": {
                "context": context_tokens,
                "notes": self.note_tokens,
                "enriched": len(enriched) if enriched is not None else 0,
                "scratchpad": len(self.scratchpad),
            },
            "triggers": [event.to_dict() for event in self.triggers],
        }


def boost_distribution(probs: torch.Tensor, start_ids: Sequence[int], boost: float) -> torch.Tensor:
    """Multiply the mass of note start tokens by ``boost`` and renormalize.

    Args:
        probs (torch.Tensor): next-token distribution
        start_ids (Sequence[int]): ids of the note start tokens
        boost (float): factor of at least 1; 1 leaves ``probs`` untouched

    Returns:
        torch.Tensor: the renormalized distribution

    Raises:
        InvalidConfig: ``boost`` below 1.

    Example:
        >>> p = torch.tensor([0.1, 0.9])
        >>> round(boost_distribution(p, [0], 5.0)[0].item(), 4)
        0.3571
        >>> torch.equal(boost_distribution(p, [0], 1.0), p)
        True
    """
    if boost < 1.0:
        raise InvalidConfig(f"boost must be at least 1, got {boost}")
    if boost == 1.0 or not len(start_ids):
        return probs
    boosted = probs.clone()
    index = torch.tensor(sorted(start_ids), dtype=torch.long)
    boosted[index] = boosted[index] * boost
    return boosted / boosted.sum()


def select_token(probs: torch.Tensor, dc: DecodeConfig, generator: torch.Generator) -> int:
    """Greedy argmax (first index on ties) or a temperature sample.

    Args:
        probs (torch.Tensor): next-token distribution
        dc (DecodeConfig): sampling mode and temperature
        generator (torch.Generator): random source of sampled decoding

    Returns:
        int: the chosen token id
    """
    if dc.sampling == "greedy":
        return int(torch.argmax(probs))
    weights = probs.clamp_min(0.0) ** (1.0 / dc.temperature)
    total = weights.sum()
    if not torch.isfinite(total) or total <= 0:
        return int(torch.argmax(probs))
    return int(torch.multinomial(weights / total, 1, generator=generator))


def _cap(model: LanguageModel, dc: DecodeConfig) -> int:
    return min(dc.context_cap, model.max_positions)


def _generate(
    model: LanguageModel,
    ids: List[int],
    limit: int,
    stop_ids: FrozenSet[int],
    cap: int,
    dc: DecodeConfig,
    generator: torch.Generator,
) -> Tuple[List[int], bool, bool]:
    """Extend ``ids`` until a stop token; returns (new ids, stopped, overflowed)."""
    generated: List[int] = []
    while len(generated) < limit:
        if len(ids) + len(generated) >= cap:
            return generated, False, True
        token = select_token(next_token_dist(model, ids + generated), dc, generator)
        generated.append(token)
        if token in stop_ids:
            return generated, True, False
    return generated, False, False


def _split_answer(tokens: List[str], terminated: bool) -> List[str]:
    return tokens[:-1] if terminated else tokens


def decode_vanilla(
    model: LanguageModel, sample: Sample, dc: DecodeConfig, seed: Optional[int] = None
) -> DecodeResult:
    """Context, question, then the answer directly.

    Args:
        model (LanguageModel): model to decode with
        sample (Sample): sample whose context and question form the prompt
        dc (DecodeConfig): decoding settings
        seed (Optional[int]): overrides ``dc.seed``

    Returns:
        DecodeResult: the answer, flagged when the prompt or answer overflows
    """
    vocab = model.vocab
    generator = torch.Generator().manual_seed(dc.seed if seed is None else seed)
    prompt = vocab.encode([BOS, *sample.context, *sample.question])
    cap = _cap(model, dc)
    if len(prompt) > cap:
        return DecodeResult("vanilla", overflow=True)
    generated, stopped, overflow = _generate(
        model, prompt, dc.max_answer_len, frozenset([vocab.eos_id]), cap, dc, generator
    )
    answer = _split_answer(vocab.decode(generated), stopped)
    return DecodeResult("vanilla", answer=answer, terminated=stopped, overflow=overflow)


def decode_scratchpad(
    model: LanguageModel, sample: Sample, dc: DecodeConfig, seed: Optional[int] = None
) -> DecodeResult:
    """Free generation of ``[ reasoning ] answer`` after the question, cut at the cap.

    Only the span after the closing bracket is the answer.

    Args:
        model (LanguageModel): model to decode with
        sample (Sample): sample whose context and question form the prompt
        dc (DecodeConfig): decoding settings
        seed (Optional[int]): overrides ``dc.seed``

    Returns:
        DecodeResult: the answer and the bracketed reasoning; no answer when
        the closing bracket never comes
    """
    vocab = model.vocab
    generator = torch.Generator().manual_seed(dc.seed if seed is None else seed)
    prompt = vocab.encode([BOS, *sample.context, *sample.question])
    cap = _cap(model, dc)
    if len(prompt) > cap:
        return DecodeResult("scratchpad", overflow=True)
    generated, stopped, overflow = _generate(
        model, prompt, cap - len(prompt), frozenset([vocab.eos_id]), cap, dc, generator
    )
    tokens = _split_answer(vocab.decode(generated), stopped)
    overflow = overflow or not stopped
    if CLOSE_BRACKET not in tokens:
        return DecodeResult("scratchpad", scratchpad=tokens, terminated=stopped, overflow=overflow)
    close = tokens.index(CLOSE_BRACKET)
    body = tokens[1:close] if tokens[:1] == [OPEN_BRACKET] else tokens[:close]
    return DecodeResult(
        "scratchpad",
        answer=tokens[close + 1 :],
        scratchpad=body,
        terminated=stopped,
        overflow=overflow,
    )


def _answer_clause(note: List[str]) -> List[str]:
    """Tokens after the note's last ``?``; the whole note when it has none."""
    if QUESTION_MARK not in note:
        return note
    last = len(note) - 1 - note[::-1].index(QUESTION_MARK)
    return note[last + 1 :]


def _answer(
    model: LanguageModel,
    prefix: List[int],
    question: TokenLike,
    dc: DecodeConfig,
    generator: torch.Generator,
    result: DecodeResult,
) -> DecodeResult:
    vocab = model.vocab
    cap = _cap(model, dc)
    ids = prefix + vocab.encode(question)
    if len(ids) > cap:
        result.overflow = True
        return result
    generated, stopped, overflow = _generate(
        model, ids, dc.max_answer_len, frozenset([vocab.eos_id]), cap, dc, generator
    )
    result.answer = _split_answer(vocab.decode(generated), stopped)
    result.terminated = stopped
    result.overflow = overflow
    return result


class _NoteController:
    """The Self-Notes loop over one context."""

    def __init__(
        self,
        model: LanguageModel,
        dc: DecodeConfig,
        task: Optional[str],
        generator: torch.Generator,
    ):
        vocab = model.vocab
        self.model = model
        self.dc = dc
        self.generator = generator
        self.cap = _cap(model, dc)
        self.start_ids = frozenset(vocab.encode(dc.note_start or vocab.note_start))
        self.end_ids = frozenset(vocab.encode(dc.note_end or vocab.note_end))
        self.delimiters = dc.trigger_delimiters(task)

    def eligible(self, context: TokenLike, position: int) -> bool:
        """Every position 0..len(context) when no delimiters gate the trigger,
        otherwise only positions right after a delimiter."""
        if self.delimiters is None:
            return True
        return position >= 1 and context[position - 1] in self.delimiters

    def _write_note(self, ids: List[int], start: int) -> Tuple[List[int], bool]:
        """Generate a note opened by ``start``; returns (note ids, overflowed)."""
        note = [start]
        while len(note) < self.dc.max_note_len and note[-1] not in self.end_ids:
            if len(ids) + len(note) >= self.cap:
                return note, True
            note.append(select_token(next_token_dist(self.model, ids + note), self.dc, self.generator))
        return note, False

    def _first_trigger(
        self,
        context: TokenLike,
        ids: List[int],
        window: List[int],
        pos: int,
        counts: Counter,
        blocked: Set[int],
    ) -> Optional[Tuple[int, TriggerEvent]]:
        probs = self.model.distributions(ids + window)
        for position in range(pos, len(context) + 1):
            if (
                position in blocked
                or counts[position] >= self.dc.per_position_limit
                or not self.eligible(context, position)
            ):
                continue
            dist = probs[len(ids) - 1 + position - pos]
            boosted = boost_distribution(dist, list(self.start_ids), self.dc.boost)
            token = select_token(boosted, self.dc, self.generator)
            if token in self.start_ids:
                index = torch.tensor(sorted(self.start_ids), dtype=torch.long)
                event = TriggerEvent(
                    position=position,
                    start_mass=float(dist[index].sum()),
                    boosted_mass=float(boosted[index].sum()),
                    token=self.model.vocab.tokens[token],
                )
                return token, event
        return None

    def run(
        self, context: TokenLike, prefix: Sequence[str] = ()
    ) -> Tuple[EnrichedContext, List[int], List[TriggerEvent], bool]:
        vocab = self.model.vocab
        context = list(context)
        context_ids = vocab.encode(context)
        ids = vocab.encode([BOS, *prefix])
        enriched = EnrichedContext()
        events: List[TriggerEvent] = []
        counts: Counter = Counter()
        blocked: Set[int] = set()
        pos = 0
        while self.dc.notes_enabled:
            window = context_ids[pos:]
            if len(ids) + len(window) > self.cap:
                enriched.add_context(context[pos:])
                return enriched, ids + window, events, True
            found = self._first_trigger(context, ids, window, pos, counts, blocked)
            if found is None:
                break
            start, event = found
            position = event.position
            enriched.add_context(context[pos:position])
            ids = ids + context_ids[pos:position]
            pos = position
            counts[position] += 1
            note_ids, overflow = self._write_note(ids, start)
            events.append(event)
            if overflow:
                enriched.add_context(context[pos:])
                return enriched, ids + context_ids[pos:], events, True
            note = vocab.decode(note_ids)
            clause = _answer_clause(note)
            inserted = clause if self.dc.answer_only_insertion else note
            if not inserted or (
                self.dc.suppress_duplicates and contains_run(enriched.tokens(), clause)
            ):
                event.inserted = False
                blocked.add(position)
                continue
            enriched.add_note(inserted, GENERATED)
            ids = ids + vocab.encode(inserted)
        enriched.add_context(context[pos:])
        ids = ids + context_ids[pos:]
        return enriched, ids, events, len(ids) > self.cap


def decode_selfnotes(
    model: LanguageModel,
    context: TokenLike,
    question: TokenLike,
    dc: DecodeConfig,
    task: Optional[str] = None,
    seed: Optional[int] = None,
    prefix: Sequence[str] = (),
) -> DecodeResult:
    """Read the context, writing notes wherever the model opens one, then answer.

    At each eligible position the boosted next-token distribution picks a
    token; a note start opens a note that runs to an end token or
    ``max_note_len``. The note (or its answer clause) is inserted where it
    was triggered, and the same position is checked again up to
    ``per_position_limit`` times.

    Args:
        model (LanguageModel): model to decode with
        context (TokenLike): context tokens, read left to right
        question (TokenLike): question asked after the enriched context
        dc (DecodeConfig): trigger, boost and insertion settings
        task (Optional[str]): task family choosing the default trigger delimiters
        seed (Optional[int]): overrides ``dc.seed``
        prefix (Sequence[str]): tokens read before the context

    Returns:
        DecodeResult: the answer, the enriched context and every trigger event
    """
    generator = torch.Generator().manual_seed(dc.seed if seed is None else seed)
    controller = _NoteController(model, dc, task, generator)
    enriched, ids, events, overflow = controller.run(context, prefix)
    result = DecodeResult("selfnotes", enriched=enriched, triggers=events, overflow=overflow)
    if overflow:
        return result
    logger.debug(f"{len(events)} triggers, {enriched.note_token_count()} note tokens")
    return _answer(model, ids, question, dc, generator, result)


def decode_with_gold_notes(
    model: LanguageModel, sample: Sample, dc: DecodeConfig, seed: Optional[int] = None
) -> DecodeResult:
    """Answer from the gold enrichment instead of generated notes.

    Args:
        model (LanguageModel): model to decode with
        sample (Sample): sample carrying the gold notes
        dc (DecodeConfig): decoding settings
        seed (Optional[int]): overrides ``dc.seed``

    Returns:
        DecodeResult: the answer read off the gold enrichment
    """
    vocab = model.vocab
    generator = torch.Generator().manual_seed(dc.seed if seed is None else seed)
    enriched = EnrichedContext.from_notes(sample.context, sample.notes, GOLD)
    ids = vocab.encode([BOS, *enriched.tokens()])
    result = DecodeResult("gold_notes", enriched=enriched)
    if len(ids) > _cap(model, dc):
        result.overflow = True
        return result
    return _answer(model, ids, sample.question, dc, generator, result)


def answer_confidence(
    model: LanguageModel, enriched: TokenLike, question: TokenLike, answer: TokenLike
) -> float:
    """Mean log-probability of ``answer`` after the enrichment and question.

    Args:
        model (LanguageModel): scoring model
        enriched (TokenLike): context with its notes
        question (TokenLike): question tokens
        answer (TokenLike): non-empty answer to score

    Returns:
        float: mean natural-log probability per answer token

    Example:
        >>> from kedro_selfnotes.corpus.vocabulary import Vocabulary
        >>> class Uniform:
        ...     vocab = Vocabulary(["<pad>", "<bos>", "<eos>", "a", "b"], ["a"], ["b"])
        ...     max_positions = 64
        ...     def distributions(self, ids):
        ...         return torch.full((len(ids), 5), 0.2)
        >>> round(answer_confidence(Uniform(), ["a"], ["b"], ["a", "b"]), 4)
        -1.6094
    """
    assert len(answer) > 0, "answer must not be empty"
    vocab = model.vocab
    prompt = vocab.encode([BOS, *enriched, *question])
    target = vocab.encode(answer)
    probs = model.distributions(prompt + target)
    rows = torch.arange(len(prompt) - 1, len(prompt) - 1 + len(target))
    picked = probs[rows, torch.tensor(target, dtype=torch.long)]
    return float(torch.log(picked.double().clamp_min(1e-300)).mean())


def multi_sample_enrich(
    model: LanguageModel,
    context: TokenLike,
    question: TokenLike,
    dc: DecodeConfig,
    task: Optional[str] = None,
) -> DecodeResult:
    """Draw ``num_samples`` enrichments with seeds ``seed + k`` and keep the most confident.

    Ties go to the lowest sub-seed; unanswered or overflowing draws score ``-inf``.

    Args:
        model (LanguageModel): model to decode and score with
        context (TokenLike): context tokens
        question (TokenLike): question tokens
        dc (DecodeConfig): decoding settings, ``num_samples`` draws
        task (Optional[str]): task family choosing the trigger delimiters

    Returns:
        DecodeResult: the draw with the highest answer confidence
    """
    best: Optional[DecodeResult] = None
    for k in range(dc.num_samples):
        result = decode_selfnotes(model, context, question, dc, task=task, seed=dc.seed + k)
        if result.answer and not result.overflow and result.enriched is not None:
            result.confidence = answer_confidence(
                model, result.enriched.tokens(), question, result.answer
            )
        else:
            result.confidence = -math.inf
        if best is None or result.confidence > best.confidence:
            best = result
    assert best is not None
    return best


def decode(model: LanguageModel, sample: Sample, method: str, dc: DecodeConfig) -> DecodeResult:
    """Run the decoder named by ``method`` on one sample.

    ``gold_notes`` feeds the gold enrichment, ``no_notes`` runs Self-Notes
    with the trigger disabled.

    Args:
        model (LanguageModel): model to decode with
        sample (Sample): sample to answer
        method (str): one of ``DECODERS``
        dc (DecodeConfig): decoding settings

    Returns:
        DecodeResult: the decoder's result, its method set to ``method``

    Raises:
        InvalidConfig: unknown ``method``.
    """
    if method not in DECODERS:
        raise InvalidConfig(f"unknown decoder {method!r}, expected one of {DECODERS}")
    if method == "vanilla":
        return decode_vanilla(model, sample, dc)
    if method == "scratchpad":
        return decode_scratchpad(model, sample, dc)
    if method == "gold_notes":
        return decode_with_gold_notes(model, sample, dc)
    if method == "no_notes":
        result = decode_selfnotes(
            model, sample.context, sample.question, replace(dc, notes_enabled=False), sample.task
        )
        result.method = "no_notes"
        return result
    if dc.num_samples > 1:
        return multi_sample_enrich(model, sample.context, sample.question, dc, sample.task)
    return decode_selfnotes(model, sample.context, sample.question, dc, task=sample.task)
