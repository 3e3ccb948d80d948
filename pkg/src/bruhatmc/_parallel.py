"""Deterministic block-parallel trial execution.

Trials are partitioned into fixed-size blocks; a block's partial result is a
pure function of (seed, block range), so distributing blocks over any number
of worker processes and merging partials in block order reproduces the
single-worker output bit for bit.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def block_ranges(total: int, block_size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + block_size, total)) for lo in range(0, total, block_size)]


def run_blocks(total: int, block_size: int, fn: Callable, workers: int = 1) -> list:
    """Evaluate fn(lo, hi) over all blocks, in block order.

    ``fn`` must be picklable (a module-level function or functools.partial of
    one) when workers > 1.
    """
    ranges = block_ranges(total, block_size)
    if workers <= 1 or len(ranges) <= 1:
        return [fn(lo, hi) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*ranges)))


def merge_mean_var(partials: Sequence[tuple[int, float, float]]) -> tuple[int, float, float]:
    """Combine per-block (count, sum, sum of squares) triples."""
    count = sum(p[0] for p in partials)
    total = sum(p[1] for p in partials)
    sumsq = sum(p[2] for p in partials)
    return count, total, sumsq
