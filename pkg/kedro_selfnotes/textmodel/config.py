"""Model and training hyperparameters."""

from dataclasses import dataclass
from typing import Tuple

from kedro_selfnotes.errors import InvalidConfig

LOSS_MASKS = ("auto", "all_tokens", "context_and_answer", "answer_only", "notes_and_qa")


@dataclass
class ModelConfig:
    """Shape of the decoder-only transformer.

    Example:
        >>> cfg = ModelConfig(vocab_size=10, model_width=128, num_heads=4)
        >>> cfg.validate().head_width
        32
    """

    vocab_size: int = 64
    num_layers: int = 4
    num_heads: int = 4
    model_width: int = 256
    ffn_width: int = 1024
    max_positions: int = 1024
    pos_offset_range: Tuple[int, int] = (0, 128)
    dropout_rate: float = 0.0
    seed: int = 0

    @property
    def head_width(self) -> int:
        return self.model_width // self.num_heads

    @property
    def max_input_len(self) -> int:
        """Longest sequence that fits after the worst-case offset."""
        return self.max_positions - self.pos_offset_range[1]

    def validate(self) -> "ModelConfig":
        lo, hi = self.pos_offset_range
        checks = [
            (self.vocab_size >= 1, f"vocab_size must be positive, got {self.vocab_size}"),
            (self.num_layers >= 1, f"num_layers must be positive, got {self.num_layers}"),
            (self.num_heads >= 1, f"num_heads must be positive, got {self.num_heads}"),
            (
                self.model_width % self.num_heads == 0,
                f"model_width={self.model_width} is not divisible by num_heads={self.num_heads}",
            ),
            (self.ffn_width >= 1, f"ffn_width must be positive, got {self.ffn_width}"),
            (0 <= lo <= hi, f"pos_offset_range must satisfy 0 <= lo <= hi, got {lo, hi}"),
            (hi < self.max_positions, f"offset {hi} leaves no room in {self.max_positions} positions"),
            (0.0 <= self.dropout_rate < 1.0, f"dropout_rate out of [0, 1): {self.dropout_rate}"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidConfig(message)
        return self


@dataclass
class TrainConfig:
    """Optimizer schedule and loss masking."""

    learning_rate: float = 3e-4
    batch_size: int = 32
    epochs: int = 30
    loss_mask: str = "auto"
    grad_clip: float = 1.0
    eval_every: int = 0
    seed: int = 0
    weight_decay: float = 0.0

    def validate(self) -> "TrainConfig":
        if self.epochs < 1:
            raise InvalidConfig(f"epochs must be at least 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise InvalidConfig(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise InvalidConfig(f"batch_size must be positive, got {self.batch_size}")
        if self.loss_mask not in LOSS_MASKS:
            raise InvalidConfig(f"unknown loss_mask {self.loss_mask!r}, expected one of {LOSS_MASKS}")
        return self
