"""Decoding settings."""

from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional

from kedro_selfnotes.errors import InvalidConfig

TRIGGERS = ("auto", "every_token", "after_delimiters")
SAMPLING = ("greedy", "temperature")

DEFAULT_DELIMITERS = {"toy_story": (".",)}
"""Tasks whose notes are only checked after these tokens when ``trigger`` is ``auto``."""


@dataclass
class DecodeConfig:
    """How the controllers decode; ``note_start``/``note_end`` override the vocabulary sets."""

    boost: float = 1.0
    max_note_len: int = 32
    trigger: str = "auto"
    delimiters: List[str] = field(default_factory=list)
    num_samples: int = 1
    answer_only_insertion: bool = False
    suppress_duplicates: bool = False
    per_position_limit: int = 8
    max_answer_len: int = 16
    context_cap: int = 1024
    sampling: str = "greedy"
    temperature: float = 1.0
    notes_enabled: bool = True
    note_start: Optional[List[str]] = None
    note_end: Optional[List[str]] = None
    seed: int = 0

    def validate(self, max_positions: Optional[int] = None) -> "DecodeConfig":
        checks = [
            (self.boost >= 1.0, f"boost must be at least 1, got {self.boost}"),
            (self.max_note_len >= 1, f"max_note_len must be positive, got {self.max_note_len}"),
            (self.trigger in TRIGGERS, f"unknown trigger {self.trigger!r}, expected one of {TRIGGERS}"),
            (self.num_samples >= 1, f"num_samples must be positive, got {self.num_samples}"),
            (self.per_position_limit >= 0, "per_position_limit must be non-negative"),
            (self.max_answer_len >= 0, "max_answer_len must be non-negative"),
            (self.context_cap >= 1, f"context_cap must be positive, got {self.context_cap}"),
            (self.sampling in SAMPLING, f"unknown sampling {self.sampling!r}, expected one of {SAMPLING}"),
            (self.temperature > 0, f"temperature must be positive, got {self.temperature}"),
            (
                max_positions is None or self.context_cap <= max_positions,
                f"context_cap={self.context_cap} exceeds the model's {max_positions} positions",
            ),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidConfig(message)
        return self

    def trigger_delimiters(self, task: Optional[str]) -> Optional[FrozenSet[str]]:
        """Delimiters gating the trigger check, ``None`` when every token is eligible.

        Example:
            >>> sorted(DecodeConfig().trigger_delimiters("toy_story"))
            ['.']
            >>> DecodeConfig().trigger_delimiters("chess_piece") is None
            True
        """
        if self.trigger == "every_token":
            return None
        if self.delimiters:
            return frozenset(self.delimiters)
        defaults = DEFAULT_DELIMITERS.get(task or "")
        if defaults is None:
            if self.trigger == "after_delimiters":
                raise InvalidConfig(f"no delimiters configured for task {task!r}")
            return None
        return frozenset(defaults)
