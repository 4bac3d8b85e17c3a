"""Thread-cap handling.

``LAPDMD_THREADS`` caps the worker count for parallelisable stages (Monte
Carlo chunk evaluation, per-kernel fits).  Results are reduced in a fixed
index order, so outputs are bit-identical for every thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ValidationError

ENV_VAR = "LAPDMD_THREADS"


def max_threads() -> int:
    """Worker cap from the environment; defaults to 1 (serial)."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{ENV_VAR} must be an integer, got {raw!r}")
    if n < 1:
        raise ValidationError(f"{ENV_VAR} must be >= 1, got {n}")
    return n


def ordered_map(fn, items):
    """Map ``fn`` over ``items`` preserving order, threaded when allowed."""
    items = list(items)
    n_workers = min(max_threads(), len(items)) or 1
    if n_workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, items))
