"""Thread-pool fan-out for read-only checkers.

Results are returned in input order, so callers aggregate sequentially and
stay deterministic whatever the thread count.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from relhyp.core.settings import settings

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R],
    items: Sequence[T],
    *,
    threads: int | None = None,
) -> list[R]:
    """Apply ``func`` to every item, in order, with at most ``threads`` workers."""
    workers = threads if threads is not None else settings.default_threads
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def chunked(items: Sequence[T], size: int) -> list[Sequence[T]]:
    """Split a sequence into consecutive chunks of at most ``size`` items."""
    return [items[i : i + size] for i in range(0, len(items), size)]
