"""Deterministic trial execution with an optional thread cap.

Trials are independent, own their RNG streams, and write into slots indexed
by trial number, so the aggregated result is identical whatever the schedule
or thread count. The SATCRB_THREADS environment variable caps parallelism;
unset or 1 means sequential execution.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")

_ENV_VAR = "SATCRB_THREADS"


def thread_count() -> int:
    """Parallelism cap from the environment; 1 (sequential) by default."""
    raw = os.environ.get(_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def run_trials(fn: Callable[[int], T], n_trials: int) -> list[T]:
    """Evaluate fn(0..n_trials-1), results ordered by trial index."""
    workers = min(thread_count(), n_trials) if n_trials else 1
    if workers <= 1:
        return [fn(t) for t in range(n_trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_trials)))
