"""Small shared helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_budget() -> int:
    """Worker cap from FLOER_THREADS, defaulting to the machine's cores."""
    raw = os.environ.get("FLOER_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError as exc:
            raise ValueError(f"FLOER_THREADS must be an integer, got {raw!r}") from exc
        return max(1, n)
    return os.cpu_count() or 1


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map preserving input order; parallel over threads when allowed.

    Workers receive read-only inputs and results are merged in input
    order, so the output is deterministic regardless of schedule.
    """
    items = list(items)
    workers = min(thread_budget(), max(1, len(items)))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
