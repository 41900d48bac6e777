# -*- coding: utf-8 -*-
"""
Ordered map over a thread pool.

numpy and scipy release the GIL inside LAPACK/BLAS calls, so threads are
enough for the block compressions and sweeps that use this.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int]) -> int:
    """``None`` means the configured default."""
    if threads is None:
        from bfmht.settings import get_settings

        threads = get_settings().THREADS
    return max(1, int(threads))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = 1) -> List[R]:
    """
    Apply ``fn`` to every item and return results in input order.

    With one thread this is a plain loop, so results are bit-identical to
    a serial run.
    """
    items = list(items)
    threads = resolve_threads(threads)
    if threads == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
