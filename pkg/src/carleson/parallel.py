"""Ordered worker-pool map. CARLESON_THREADS caps the pool size.

Results come back in input order, so any later reduction sees the same
sequence whatever the scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable

from .errors import RangeError


def thread_count() -> int:
    raw = os.environ.get("CARLESON_THREADS", "").strip()
    if not raw:
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise RangeError(f"CARLESON_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise RangeError("CARLESON_THREADS must be at least 1")
    return n


def ordered_map(fn: Callable, items: Iterable) -> list:
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
