"""Thread-count policy and an order-preserving parallel map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "CERTQUAD_THREADS"


def thread_count(requested: Optional[int] = None) -> int:
    """Worker count: ``requested``, else ``$CERTQUAD_THREADS``; 0 means one per CPU."""
    if requested is None:
        raw = os.environ.get(ENV_VAR, "1").strip() or "1"
        try:
            requested = int(raw)
        except ValueError as exc:
            raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
    if requested < 0:
        raise ValueError(f"thread count must be nonnegative, got {requested}")
    if requested == 0:
        return os.cpu_count() or 1
    return requested


def map_ordered(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> list[R]:
    """``[func(i) for i in items]``, possibly on a thread pool; result order is input order."""
    items = list(items)
    n = thread_count(workers)
    if n <= 1 or len(items) <= 1:
        return [func(i) for i in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(func, items))
