"""Thread fan-out with deterministic, order-preserving reductions."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "HOROLAB_THREADS"


def thread_count() -> int:
    """Worker cap from ``HOROLAB_THREADS`` (defaults to the CPU count)."""
    raw = os.environ.get(ENV_VAR)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
        return n
    return max(1, os.cpu_count() or 1)


def pmap(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> List[R]:
    """``[fn(x) for x in items]`` spread over threads; output order follows input order."""
    items = list(items)
    n = thread_count() if threads is None else threads
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as ex:
        return list(ex.map(fn, items))


def shard_seeds(seed: int, shards: int) -> list:
    """Independent child generators for a fixed shard count.

    The shard layout depends only on ``shards``, never on the thread count, so
    results are identical however many workers process them.
    """
    ss = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in ss.spawn(shards)]
