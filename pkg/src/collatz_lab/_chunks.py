"""Deterministic chunked execution over integer ranges.

Chunk boundaries depend only on (lo, chunk size), never on the worker count,
and results are merged in chunk order, so any aggregate built from them is
identical whether run sequentially or on a thread pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Optional, TypeVar

T = TypeVar("T")


def chunk_spans(lo: int, hi: int, chunk: int) -> Iterator[tuple[int, int]]:
    a = lo
    while a < hi:
        b = min(a + chunk, hi)
        yield a, b
        a = b


def default_threads() -> int:
    return os.cpu_count() or 1


def run_chunked(
    lo: int,
    hi: int,
    chunk: int,
    fn: Callable[[int, int], T],
    threads: Optional[int] = None,
) -> list[T]:
    """fn(a, b) over fixed chunks of [lo, hi); results in chunk order."""
    spans = list(chunk_spans(lo, hi, chunk))
    if not spans:
        return []
    workers = default_threads() if threads is None else max(1, threads)
    if workers == 1 or len(spans) == 1:
        return [fn(a, b) for a, b in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), spans))
