"""Language-model training with role-based loss masks and position offsets."""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import pandas as pd
import torch
import torch.nn.functional as F
from torch import nn

from kedro_selfnotes.errors import ContextOverflow, NonFiniteLoss
from kedro_selfnotes.textmodel.config import TrainConfig
from kedro_selfnotes.textmodel.transformer import ModelState
from kedro_selfnotes.utils.iterable import chunked

logger = logging.getLogger(__name__)

PREFIX = "prefix"
CONTEXT = "context"
NOTE = "note"
QUESTION = "question"
SCRATCHPAD = "scratchpad"
ANSWER = "answer"
ROLES = (PREFIX, CONTEXT, NOTE, QUESTION, SCRATCHPAD, ANSWER)

_MASKED_ROLES = {
    "all_tokens": frozenset([CONTEXT, NOTE, QUESTION, SCRATCHPAD, ANSWER]),
    "context_and_answer": frozenset([CONTEXT, NOTE, SCRATCHPAD, ANSWER]),
    "answer_only": frozenset([SCRATCHPAD, ANSWER]),
    "notes_and_qa": frozenset([NOTE, QUESTION, ANSWER]),
}
"""Roles whose tokens are prediction targets under each mask."""


@dataclass(frozen=True)
class TrainingSequence:
    """Tokens of one sequence with the role each token plays."""

    tokens: Tuple[str, ...]
    roles: Tuple[str, ...]
    method: str = "vanilla"
    copy_style: bool = True

    def __post_init__(self):
        assert len(self.tokens) == len(self.roles), "one role per token"
        unknown = set(self.roles) - set(ROLES)
        assert not unknown, f"unknown roles {sorted(unknown)}"

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def default_mask(self) -> str:
        if self.method == "scratchpad":
            return "answer_only" if self.copy_style else "context_and_answer"
        return "all_tokens"


def loss_mask(sequence: TrainingSequence, mode: str = "auto") -> List[bool]:
    """Whether each token is a prediction target.

    Example:
        >>> seq = TrainingSequence(("<bos>", "x", "print", "x", "3"),
        ...                        ("prefix", "context", "question", "question", "answer"))
        >>> loss_mask(seq, "answer_only")
        [False, False, False, False, True]
        >>> loss_mask(seq, "context_and_answer")
        [False, True, False, False, True]
    """
    if mode == "auto":
        mode = sequence.default_mask
    targets = _MASKED_ROLES[mode]
    return [role in targets for role in sequence.roles]


def masked_loss(
    module: nn.Module,
    ids: torch.Tensor,
    weights: torch.Tensor,
    offsets: Optional[torch.Tensor] = None,
) -> Tuple[torch.Tensor, torch.Tensor]:
    """Mean cross-entropy over weighted targets and the number of targets."""
    logits = module(ids[:, :-1], offsets)
    targets = ids[:, 1:]
    target_weights = weights[:, 1:].to(logits.dtype)
    ce = F.cross_entropy(
        logits.reshape(-1, logits.shape[-1]), targets.reshape(-1), reduction="none"
    )
    count = target_weights.sum()
    loss = (ce * target_weights.reshape(-1)).sum() / count.clamp(min=1.0)
    return loss, count


def _pack(
    encoded: Sequence[List[int]], masks: Sequence[List[bool]], rows: Sequence[int], pad_id: int
) -> Tuple[torch.Tensor, torch.Tensor]:
    length = max(len(encoded[i]) for i in rows)
    ids = torch.full((len(rows), length), pad_id, dtype=torch.long)
    weights = torch.zeros((len(rows), length), dtype=torch.bool)
    for row, i in enumerate(rows):
        ids[row, : len(encoded[i])] = torch.tensor(encoded[i], dtype=torch.long)
        weights[row, : len(masks[i])] = torch.tensor(masks[i], dtype=torch.bool)
    return ids, weights


@dataclass
class TrainReport:
    """Per-step losses plus the accuracies measured at evaluation epochs."""

    losses: List[float] = field(default_factory=list)
    epochs: List[int] = field(default_factory=list)
    epoch_losses: List[float] = field(default_factory=list)
    accuracies: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else float("nan")

    def end_epoch(self, epoch: int, losses: Sequence[float], epochs: int):
        mean = sum(losses) / len(losses) if losses else float("nan")
        self.epoch_losses.append(mean)
        logger.info(f"Epoch {epoch}/{epochs}: loss {mean:.4f}")

    def record_accuracy(self, epoch: int, accuracy: float):
        self.accuracies.append((epoch, accuracy))
        logger.info(f"Epoch {epoch}: accuracy {accuracy:.3f}")

    def to_frame(self) -> pd.DataFrame:
        """One row per optimizer step; ``accuracy`` is set on evaluated epochs."""
        frame = pd.DataFrame(
            {
                "step": range(1, len(self.losses) + 1),
                "epoch": self.epochs,
                "loss": self.losses,
            }
        )
        frame["accuracy"] = float("nan")
        for epoch, accuracy in self.accuracies:
            rows = frame.index[frame["epoch"] == epoch]
            if len(rows):
                frame.loc[rows[-1], "accuracy"] = accuracy
        return frame


def _check_finite(module: nn.Module, step: int):
    for name, param in module.named_parameters():
        if not torch.isfinite(param).all():
            raise NonFiniteLoss(f"parameter {name} is not finite after step {step}")


def check_fits(state: ModelState, sequences: Sequence[TrainingSequence]):
    """Raise ``ContextOverflow`` if a sequence exceeds the positions at the largest offset."""
    cfg = state.config
    high = cfg.pos_offset_range[1]
    longest = max((len(seq) for seq in sequences), default=0)
    if longest + high > cfg.max_positions:
        raise ContextOverflow(
            f"sequence of {longest} tokens with offset {high} exceeds {cfg.max_positions} positions"
        )


def make_optimizer(state: ModelState, tc: TrainConfig) -> torch.optim.Optimizer:
    return torch.optim.Adam(
        state.module.parameters(), lr=tc.learning_rate, weight_decay=tc.weight_decay
    )


def sample_offsets(state: ModelState, count: int, generator: torch.Generator) -> torch.Tensor:
    """One position offset per sequence, uniform over ``pos_offset_range``."""
    low, high = state.config.pos_offset_range
    if high > low:
        return torch.randint(low, high + 1, (count,), generator=generator)
    return torch.full((count,), low, dtype=torch.long)


def train_step(
    state: ModelState,
    optimizer: torch.optim.Optimizer,
    sequences: Sequence[TrainingSequence],
    offsets: torch.Tensor,
    tc: TrainConfig,
) -> Optional[float]:
    """One optimizer step on a batch; ``None`` when the batch has no targets."""
    encoded = [state.vocab.encode(seq.tokens) for seq in sequences]
    masks = [loss_mask(seq, tc.loss_mask) for seq in sequences]
    rows = list(range(len(sequences)))
    ids, weights = _pack(encoded, masks, rows, state.vocab.pad_id)
    module = state.module
    module.train()
    loss, count = masked_loss(module, ids, weights, offsets)
    if count.item() == 0:
        return None
    if not torch.isfinite(loss):
        raise NonFiniteLoss(f"loss {loss.item()} at step {state.step + 1}")
    optimizer.zero_grad()
    loss.backward()
    nn.utils.clip_grad_norm_(module.parameters(), tc.grad_clip)
    optimizer.step()
    state.step += 1
    _check_finite(module, state.step)
    return loss.item()


def train(
    state: ModelState,
    sequences: Sequence[TrainingSequence],
    tc: TrainConfig,
    evaluate: Optional[Callable[[ModelState], float]] = None,
) -> TrainReport:
    """Train ``state`` in place on ``sequences``.

    Each sequence gets a fresh position offset per epoch, drawn uniformly from
    the model's ``pos_offset_range``.

    Raises:
        ContextOverflow: a sequence does not fit after the worst-case offset.
        NonFiniteLoss: a loss or parameter stopped being finite.
    """
    tc.validate()
    report = TrainReport()
    if not sequences:
        logger.warning("No training sequences, nothing to do")
        return report
    check_fits(state, sequences)
    optimizer = make_optimizer(state, tc)
    generator = torch.Generator().manual_seed(tc.seed)
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(tc.seed)
        for epoch in range(1, tc.epochs + 1):
            order = torch.randperm(len(sequences), generator=generator).tolist()
            offsets = sample_offsets(state, len(sequences), generator)
            epoch_losses = []
            for rows in chunked(order, tc.batch_size):
                batch = [sequences[i] for i in rows]
                loss = train_step(state, optimizer, batch, offsets[list(rows)], tc)
                if loss is None:
                    continue
                report.losses.append(loss)
                report.epochs.append(epoch)
                epoch_losses.append(loss)
            report.end_epoch(epoch, epoch_losses, tc.epochs)
            if evaluate is not None and tc.eval_every and epoch % tc.eval_every == 0:
                report.record_accuracy(epoch, evaluate(state))
    state.module.eval()
    return report
