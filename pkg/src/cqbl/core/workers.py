"""Thread pool for grids, multi-starts and randomized suites."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

import numpy as np
import psutil

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: int = 0) -> int:
    """Worker count: the configured value when positive, else the physical core count."""
    if threads and threads > 0:
        return int(threads)
    try:
        cores = psutil.cpu_count(logical=False)
    except Exception:
        cores = None
    return cores or 1


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """Independent, reproducible generators, one per shard."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


class WorkerPool:
    """Runs independent tasks and returns their results in submission order."""

    def __init__(self, threads: int = 0):
        self.logger = logging.getLogger(__name__)
        self.threads = resolve_threads(threads)

    def map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        if self.threads <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        self.logger.debug(f"Dispatching {len(items)} tasks to {self.threads} workers")
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            return list(executor.map(fn, items))
