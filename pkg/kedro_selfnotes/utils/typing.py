"""Package for type annotations."""

from typing import Sequence, Tuple, TypeVar

T = TypeVar("T")
Tokens = Tuple[str, ...]
TokenLike = Sequence[str]
