#!/usr/bin/env python3
"""
Trial Runner for distgraph-lab
Runs independent Monte Carlo chunks inline or on a spawn-context process pool.
"""

import os
import logging
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(threads: int) -> int:
    """0 means the available parallelism"""
    if threads is None or threads <= 0:
        return os.cpu_count() or 1
    return threads


def split_range(total: int, chunks: int) -> List[range]:
    """Contiguous ranges covering 0..total-1, at most `chunks` of them"""
    chunks = max(1, min(chunks, total))
    size, extra = divmod(total, chunks)
    ranges, start = [], 0
    for i in range(chunks):
        stop = start + size + (1 if i < extra else 0)
        ranges.append(range(start, stop))
        start = stop
    return [r for r in ranges if len(r)]


class TrialRunner:
    """Order-preserving map over picklable tasks"""

    def __init__(self, threads: int = 0):
        self.workers = resolve_workers(threads)

    def map(self, fn: Callable[[T], R], tasks: Sequence[T]) -> List[R]:
        tasks = list(tasks)
        if self.workers <= 1 or len(tasks) <= 1:
            return [fn(task) for task in tasks]

        workers = min(self.workers, len(tasks))
        logger.debug(f"Running {len(tasks)} tasks on {workers} worker processes")
        ctx = mp.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
            return list(ex.map(fn, tasks))
