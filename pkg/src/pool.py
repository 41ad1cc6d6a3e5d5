"""Thread pool helpers. Results always come back in submission order."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_jobs(jobs: int) -> int:
    """0 means one worker per logical core."""
    if jobs <= 0:
        return os.cpu_count() or 1
    return jobs


def ordered_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    items = list(items)
    workers = min(resolve_jobs(jobs), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
