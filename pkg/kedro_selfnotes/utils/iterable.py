"""Utils for iterable manipulation."""

from typing import Iterable, Iterator, Sequence

from kedro_selfnotes.utils.typing import T


def chunked(items: Sequence[T], size: int) -> Iterator[Sequence[T]]:
    """Yield consecutive slices of ``size`` items, the last one may be shorter.

    Example:
        >>> list(chunked([1, 2, 3, 4, 5], 2))
        [[1, 2], [3, 4], [5]]
    """
    assert size >= 1, f"chunk size must be positive, got {size}"
    for start in range(0, len(items), size):
        yield items[start : start + size]


def contains_run(haystack: Sequence[T], needle: Sequence[T]) -> bool:
    """Whether ``needle`` occurs as a contiguous run inside ``haystack``.

    Example:
        >>> contains_run("a b c d".split(), ["b", "c"])
        True
        >>> contains_run("a b c d".split(), ["c", "b"])
        False
        >>> contains_run([1], [])
        False
    """
    width = len(needle)
    if width == 0 or width > len(haystack):
        return False
    first = needle[0]
    for start in range(len(haystack) - width + 1):
        if haystack[start] == first and list(haystack[start : start + width]) == list(
            needle
        ):
            return True
    return False


def is_subsequence(needle: Iterable[T], haystack: Iterable[T]) -> bool:
    """Whether ``needle`` appears in ``haystack`` in order, gaps allowed.

    Example:
        >>> is_subsequence([1, 3], [1, 2, 3])
        True
        >>> is_subsequence([3, 1], [1, 2, 3])
        False
    """
    remaining = iter(haystack)
    return all(any(item == other for other in remaining) for item in needle)
