"""Worker-count resolution and deterministic chunked execution.

Parallel loops in this package only ever split embarrassingly parallel work
(disjoint output slots, no shared accumulators), so every element is computed
by the same arithmetic regardless of the worker count and results are bitwise
reproducible. WSP_WORKERS overrides the configured count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ParameterError

ENV_VAR = "WSP_WORKERS"


def resolve_workers(requested=None) -> int:
    env = os.environ.get(ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ParameterError(f"{ENV_VAR}={env!r} is not an integer") from exc
    elif requested is not None:
        value = int(requested)
    else:
        value = 1
    if value < 1:
        raise ParameterError(f"worker count must be >= 1, got {value}")
    return value


def chunked_map(fn, items, workers: int = 1):
    """Map fn over items, possibly on a thread pool; output order is fixed."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
