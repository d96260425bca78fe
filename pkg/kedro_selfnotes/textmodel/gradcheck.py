"""Central finite differences against autograd, in double precision."""

import copy
import logging
from typing import Dict

import torch

from kedro_selfnotes.textmodel.training import TrainingSequence, loss_mask, masked_loss
from kedro_selfnotes.textmodel.transformer import ModelState, TransformerLM

logger = logging.getLogger(__name__)


def _double_copy(state: ModelState) -> TransformerLM:
    module = copy.deepcopy(state.module).double()
    module.eval()
    return module


def _tensors(state: ModelState, sequence: TrainingSequence, mode: str):
    ids = torch.tensor([state.vocab.encode(sequence.tokens)], dtype=torch.long)
    weights = torch.tensor([loss_mask(sequence, mode)], dtype=torch.bool)
    return ids, weights


def analytic_gradients(
    state: ModelState, sequence: TrainingSequence, mode: str = "all_tokens"
) -> Dict[str, torch.Tensor]:
    """Autograd gradient of the masked loss for every parameter."""
    module = _double_copy(state)
    ids, weights = _tensors(state, sequence, mode)
    loss, _ = masked_loss(module, ids, weights)
    module.zero_grad()
    loss.backward()
    return {
        name: (p.grad.clone() if p.grad is not None else torch.zeros_like(p))
        for name, p in module.named_parameters()
    }


def grad_check(
    state: ModelState,
    sequence: TrainingSequence,
    mode: str = "all_tokens",
    eps: float = 1e-5,
    samples_per_tensor: int = 3,
    seed: int = 0,
) -> float:
    """Largest relative error between analytic and numeric gradients.

    A few entries of every parameter tensor are perturbed by ``±eps``; the
    relative error is ``|a - n| / max(|a|, |n|, 1e-6)``.
    """
    module = _double_copy(state)
    ids, weights = _tensors(state, sequence, mode)

    def _loss() -> float:
        with torch.no_grad():
            return masked_loss(module, ids, weights)[0].item()

    loss, _ = masked_loss(module, ids, weights)
    module.zero_grad()
    loss.backward()
    generator = torch.Generator().manual_seed(seed)
    worst = 0.0
    for name, param in module.named_parameters():
        flat = param.data.view(-1)
        grad = param.grad.view(-1) if param.grad is not None else torch.zeros_like(flat)
        picks = torch.randint(flat.numel(), (samples_per_tensor,), generator=generator)
        for index in picks.tolist():
            original = flat[index].item()
            flat[index] = original + eps
            plus = _loss()
            flat[index] = original - eps
            minus = _loss()
            flat[index] = original
            numeric = (plus - minus) / (2 * eps)
            analytic = grad[index].item()
            error = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            if error > worst:
                logger.debug(f"{name}[{index}]: analytic {analytic:.3e} numeric {numeric:.3e}")
            worst = max(worst, error)
    return worst
