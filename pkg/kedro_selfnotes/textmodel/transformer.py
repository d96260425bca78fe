"""A small pre-LayerNorm decoder-only transformer and its state."""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import torch
from torch import nn
from typing_extensions import Protocol, runtime_checkable

from kedro_selfnotes.corpus.vocabulary import Vocabulary
from kedro_selfnotes.errors import ContextOverflow, InvalidConfig
from kedro_selfnotes.textmodel.config import ModelConfig

INIT_STD = 0.02


@runtime_checkable
class LanguageModel(Protocol):
    """Anything the decoders can query for next-token distributions."""

    vocab: Vocabulary

    @property
    def max_positions(self) -> int:
        ...

    def distributions(self, ids: Sequence[int]) -> torch.Tensor:
        """Row ``j`` is the distribution of the token following ``ids[: j + 1]``."""
        ...


class CausalSelfAttention(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.num_heads = cfg.num_heads
        self.head_width = cfg.head_width
        self.qkv = nn.Linear(cfg.model_width, 3 * cfg.model_width)
        self.proj = nn.Linear(cfg.model_width, cfg.model_width)
        self.dropout = nn.Dropout(cfg.dropout_rate)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        batch, length, width = x.shape
        q, k, v = self.qkv(x).split(width, dim=-1)
        q, k, v = (
            t.view(batch, length, self.num_heads, self.head_width).transpose(1, 2)
            for t in (q, k, v)
        )
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_width)
        causal = torch.ones(length, length, dtype=torch.bool, device=x.device).tril()
        scores = scores.masked_fill(~causal, float("-inf"))
        weights = self.dropout(scores.softmax(dim=-1))
        out = (weights @ v).transpose(1, 2).reshape(batch, length, width)
        return self.dropout(self.proj(out))


class Block(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.ln1 = nn.LayerNorm(cfg.model_width)
        self.attn = CausalSelfAttention(cfg)
        self.ln2 = nn.LayerNorm(cfg.model_width)
        self.mlp = nn.Sequential(
            nn.Linear(cfg.model_width, cfg.ffn_width),
            nn.GELU(),
            nn.Linear(cfg.ffn_width, cfg.model_width),
            nn.Dropout(cfg.dropout_rate),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.ln1(x))
        return x + self.mlp(self.ln2(x))


class TransformerLM(nn.Module):
    """Learned absolute positions so training can shift them by an offset."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.tok = nn.Embedding(cfg.vocab_size, cfg.model_width)
        self.pos = nn.Embedding(cfg.max_positions, cfg.model_width)
        self.drop = nn.Dropout(cfg.dropout_rate)
        self.blocks = nn.ModuleList(Block(cfg) for _ in range(cfg.num_layers))
        self.ln_f = nn.LayerNorm(cfg.model_width)
        self.head = nn.Linear(cfg.model_width, cfg.vocab_size, bias=False)
        self._init_weights()

    def _init_weights(self):
        residual_std = INIT_STD / math.sqrt(2 * self.cfg.num_layers)
        for name, param in self.named_parameters():
            if name.endswith("bias"):
                nn.init.zeros_(param)
            elif "ln" in name:
                nn.init.ones_(param)
            elif name.endswith("attn.proj.weight") or name.endswith("mlp.2.weight"):
                nn.init.normal_(param, mean=0.0, std=residual_std)
            else:
                nn.init.normal_(param, mean=0.0, std=INIT_STD)

    def forward(self, ids: torch.Tensor, offsets: Optional[torch.Tensor] = None) -> torch.Tensor:
        """Logits of shape ``[batch, length, vocab]``."""
        _, length = ids.shape
        positions = torch.arange(length, device=ids.device).unsqueeze(0)
        if offsets is not None:
            positions = positions + offsets.unsqueeze(1)
        if int(positions.max()) >= self.cfg.max_positions:
            raise ContextOverflow(
                f"position {int(positions.max())} exceeds max_positions={self.cfg.max_positions}"
            )
        x = self.drop(self.tok(ids) + self.pos(positions))
        for block in self.blocks:
            x = block(x)
        return self.head(self.ln_f(x))


@dataclass
class ModelState:
    """Module, config, vocabulary and optimizer step count."""

    module: TransformerLM
    config: ModelConfig
    vocab: Vocabulary
    step: int = 0

    @property
    def max_positions(self) -> int:
        return self.config.max_positions

    def distributions(self, ids: Sequence[int]) -> torch.Tensor:
        if not len(ids):
            raise ValueError("prefix must hold at least the start token")
        if len(ids) > self.max_positions:
            raise ContextOverflow(f"{len(ids)} tokens exceed {self.max_positions} positions")
        self.module.eval()
        with torch.no_grad():
            batch = torch.tensor([list(ids)], dtype=torch.long)
            logits = self.module(batch)[0]
        return logits.float().softmax(dim=-1)


def init_model(cfg: ModelConfig, vocab: Vocabulary) -> ModelState:
    """Fresh model, bit-identical for a fixed ``cfg.seed``.

    Raises:
        InvalidConfig: invalid shape or a vocabulary of another size.
    """
    cfg.validate()
    if len(vocab) != cfg.vocab_size:
        raise InvalidConfig(f"vocab_size={cfg.vocab_size} but the vocabulary has {len(vocab)} tokens")
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(cfg.seed)
        module = TransformerLM(cfg)
    return ModelState(module=module, config=cfg, vocab=vocab)


def next_token_dist(model: LanguageModel, prefix: Sequence[int]) -> torch.Tensor:
    """Probability vector over the vocabulary for the token after ``prefix``.

    Raises:
        ContextOverflow: the prefix does not fit the model positions.
    """
    if len(prefix) > model.max_positions:
        raise ContextOverflow(f"{len(prefix)} tokens exceed {model.max_positions} positions")
    return model.distributions(prefix)[-1]
