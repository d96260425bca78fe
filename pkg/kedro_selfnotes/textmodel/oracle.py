"""A scripted model that always predicts the gold continuation."""

import threading
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import torch

from kedro_selfnotes.corpus.readers import IGNORED_TOKENS, Reader, make_reader
from kedro_selfnotes.corpus.sample import BOS, CLOSE_BRACKET, EOS, OPEN_BRACKET, PAD, Sample
from kedro_selfnotes.corpus.targets import scratchpad_body
from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.errors import InvalidConfig, SelfNotesError
from kedro_selfnotes.utils.typing import Tokens

METHODS = ("vanilla", "scratchpad", "selfnotes")

AnswerKey = Tuple[Tokens, Tokens]


def answer_key(context: Iterable[str], question: Iterable[str]) -> AnswerKey:
    """Lookup key of a sample, control tokens removed."""
    return (
        tuple(tok for tok in context if tok not in IGNORED_TOKENS),
        tuple(tok for tok in question if tok not in IGNORED_TOKENS),
    )


class _Session:
    """Reads one token stream and records the prediction after each token."""

    def __init__(self, oracle: "OracleModel"):
        self.oracle = oracle
        self.reader: Reader = make_reader(oracle.task)
        self.tokens: List[str] = []
        self.predictions: List[str] = []
        self.note: Optional[Tokens] = None
        self.written: List[str] = []
        self.last_note: Optional[Tokens] = None
        self.question: Optional[List[str]] = None
        self.output: Optional[List[str]] = None
        self.produced = 0

    def push(self, token: str):
        self.tokens.append(token)
        self._consume(token)
        self.predictions.append(self._predict())

    def _due(self) -> List[Tokens]:
        if self.oracle.method != "selfnotes" or not self.reader.at_boundary:
            return []
        return self.reader.due_notes()

    def _consume(self, token: str):
        if token == BOS and len(self.tokens) == 1:
            return
        if self.output is not None:
            if not (token in IGNORED_TOKENS and self.produced == 0):
                self.produced += 1
            return
        if self.question is not None:
            if token not in IGNORED_TOKENS:
                self._ask(self.question + [token])
            return
        if self.note is not None:
            self._write(token)
            return
        self.last_note = None
        due = self._due()
        if due and token == due[0][0]:
            self.note, self.written = due[0], []
            self._write(token)
        elif self.reader.at_boundary and self.reader.is_question_start(token):
            self._ask([token])
        else:
            self.reader.feed(token)

    def _write(self, token: str):
        assert self.note is not None
        if token == self.note[len(self.written)]:
            self.written.append(token)
            if len(self.written) == len(self.note):
                self.reader.observe_note(self.note)
                self.last_note, self.note, self.written = self.note, None, []
            return
        # not the note after all: the tokens were a question or plain input
        pending, self.note, self.written = self.written + [token], None, []
        if self.reader.is_question_start(pending[0]):
            self._ask(pending)
        else:
            for tok in pending:
                self.reader.feed(tok)

    def _ask(self, question: List[str]):
        self.question = question
        if self.reader.question_complete(question):
            self.output = self._continuation(question)

    def _continuation(self, question: List[str]) -> List[str]:
        reader = self.reader
        answer = self.oracle.answers.get(answer_key(reader.context, question))
        if answer is None:
            try:
                answer = tuple(reader.answer(question))
            except (SelfNotesError, KeyError, ValueError):
                answer = ()
        output = list(answer) + [EOS]
        if self.oracle.method == "scratchpad":
            body = scratchpad_body(reader.task, reader.context, reader.annotations)
            output = [OPEN_BRACKET] + body + [CLOSE_BRACKET] + output
        return output

    def _predict(self) -> str:
        if self.output is not None:
            return self.output[self.produced] if self.produced < len(self.output) else EOS
        if self.question is not None:
            return PAD
        if self.note is not None:
            return self.note[len(self.written)]
        due = self._due()
        if due:
            return due[0][0]
        if self.last_note is not None and self.reader.is_question_start(self.last_note[0]):
            # the note read so far is indistinguishable from question + answer
            return EOS
        return PAD


class OracleModel:
    """Method-aware stand-in for a perfectly trained model.

    Input positions predict ``<pad>``; a ``selfnotes`` oracle predicts each
    due note where it falls due; after a complete question it predicts the
    scratchpad (``scratchpad`` only), the answer and ``<eos>``. Every
    distribution is one-hot.
    """

    def __init__(
        self,
        task: str,
        method: str,
        vocab: Vocabulary,
        answers: Optional[Dict[AnswerKey, Tokens]] = None,
        max_positions: int = 1 << 20,
    ):
        if method not in METHODS:
            raise InvalidConfig(f"unknown method {method!r}, expected one of {METHODS}")
        self.task = task
        self.method = method
        self.vocab = vocab
        self.answers: Dict[AnswerKey, Tokens] = dict(answers or {})
        self._max_positions = max_positions
        self._local = threading.local()

    @property
    def max_positions(self) -> int:
        return self._max_positions

    def _session(self, tokens: List[str]) -> _Session:
        session: Optional[_Session] = getattr(self._local, "session", None)
        if session is not None:
            known = len(session.tokens)
            if known >= len(tokens) and session.tokens[: len(tokens)] == tokens:
                return session
            if known < len(tokens) and tokens[:known] == session.tokens:
                for token in tokens[known:]:
                    session.push(token)
                return session
        session = _Session(self)
        for token in tokens:
            session.push(token)
        self._local.session = session
        return session

    def predictions(self, ids: Sequence[int]) -> List[str]:
        tokens = self.vocab.decode(ids)
        return self._session(tokens).predictions[: len(tokens)]

    def distributions(self, ids: Sequence[int]) -> torch.Tensor:
        predicted = self.vocab.encode(self.predictions(ids))
        probs = torch.zeros(len(predicted), len(self.vocab))
        probs[torch.arange(len(predicted)), torch.tensor(predicted, dtype=torch.long)] = 1.0
        return probs


def make_oracle_model(
    task: str,
    method: str,
    vocab: Vocabulary,
    samples: Sequence[Sample] = (),
    max_positions: int = 1 << 20,
) -> OracleModel:
    """Oracle for ``task``; ``samples`` supply answers not derivable from a prefix.

    Example:
        >>> from kedro_selfnotes.corpus.programs import make_program_sample
        >>> s = make_program_sample("algorithmic", "x = 7 ;".split(), "x")
        >>> vocab = Vocabulary.build("algorithmic", [s])
        >>> oracle = make_oracle_model("algorithmic", "vanilla", vocab)
        >>> tokens = ["<bos>", *s.context, *s.question]
        >>> oracle.predictions(vocab.encode(tokens))[-1]
        'x'
    """
    answers = {answer_key(s.context, s.question): tuple(s.answer) for s in samples}
    return OracleModel(task, method, vocab, answers, max_positions)
