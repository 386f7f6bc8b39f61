"""Deterministic thread mapping.

Work is split into independent units (one per permutation, resample, or
replication), each unit seeds its own RNG substream, and results are
collected in submission order. The thread count therefore changes wall
time but never a single output byte.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "CHT_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Explicit argument wins, then the CHT_THREADS variable, then every
    available core. Outputs never depend on the resolved count."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Sequence[T] | Iterable[T], threads: int = 1) -> list[R]:
    """Map fn over items, preserving order regardless of thread count."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
