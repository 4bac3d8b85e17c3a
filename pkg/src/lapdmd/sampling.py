"""Irregular and sparse snapshot sets from full data.

The "irregular" collection is modelled by a seeded column shuffle whose
permutation is recorded so the ground-truth alignment stays recoverable;
"sparse" is truncation to the first ``n_keep`` columns of the shuffled
order.  A column-major reshape supports the long-trajectory benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .errors import ValidationError
from .validation import require_int


@dataclass(frozen=True)
class SamplingPlan:
    """Shuffle seed, partial-rank column count, optional reshape target."""

    seed: int
    n_keep: int | None = None
    reshape: tuple[int, int] | None = None

    def __post_init__(self):
        require_int("seed", self.seed, minimum=0)
        if self.n_keep is not None:
            require_int("n_keep", self.n_keep, minimum=1)
        if self.reshape is not None:
            rows, cols = self.reshape
            require_int("reshape rows", rows, minimum=1)
            require_int("reshape cols", cols, minimum=1)

    def apply(self, m: DataMatrix) -> tuple[DataMatrix, np.ndarray]:
        """shuffle -> partial -> (reshape); returns the permutation record."""
        out, perm = shuffle_columns(m, self.seed)
        if self.n_keep is not None:
            out = take_partial(out, self.n_keep)
        if self.reshape is not None:
            out = reshape_series(out, *self.reshape)
        return out, perm


def shuffle_columns(m: DataMatrix, seed: int) -> tuple[DataMatrix, np.ndarray]:
    """Permute columns by a seeded Fisher-Yates shuffle.

    Returns the shuffled matrix and the permutation ``perm`` such that
    ``out[:, j] == m.values[:, perm[j]]``.
    """
    require_int("seed", seed, minimum=0)
    perm = np.random.default_rng(seed).permutation(m.m_time)
    labels = None
    if m.time_labels is not None:
        labels = [m.time_labels[j] for j in perm]
    out = DataMatrix(m.values[:, perm].copy(), dt=m.dt,
                     space_labels=m.space_labels, time_labels=labels)
    return out, perm


def invert_permutation(perm: np.ndarray) -> np.ndarray:
    return np.argsort(perm)


def apply_permutation(m: DataMatrix, perm: np.ndarray) -> DataMatrix:
    """Reorder columns by an explicit permutation (e.g. a recorded inverse)."""
    perm = np.asarray(perm, dtype=int)
    if sorted(perm.tolist()) != list(range(m.m_time)):
        raise ValidationError("perm is not a permutation of the column indices")
    return DataMatrix(m.values[:, perm].copy(), dt=m.dt, space_labels=m.space_labels)


def take_partial(m: DataMatrix, n_keep: int) -> DataMatrix:
    """Keep the first ``n_keep`` columns in the current order (bit-exact)."""
    require_int("n_keep", n_keep, minimum=1)
    if n_keep > m.m_time:
        raise ValidationError(
            f"n_keep={n_keep} out of range for {m.m_time} columns"
        )
    labels = m.time_labels[:n_keep] if m.time_labels is not None else None
    return DataMatrix(m.values[:, :n_keep].copy(), dt=m.dt,
                      space_labels=m.space_labels, time_labels=labels)


def reshape_series(m: DataMatrix, rows: int, cols: int) -> DataMatrix:
    """Flatten column-major, truncate to rows*cols elements, reshape to rows x cols."""
    require_int("rows", rows, minimum=1)
    require_int("cols", cols, minimum=1)
    total = rows * cols
    if total > m.values.size:
        raise ValidationError(
            f"reshape target {rows}x{cols} needs {total} elements, "
            f"source has {m.values.size}"
        )
    flat = m.values.reshape(-1, order="F")[:total]
    return DataMatrix(flat.reshape((rows, cols), order="F").copy(), dt=m.dt)


def build_pairs(m: DataMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Successor pairs in the provided column order: X = cols 0..M-2, Y = cols 1..M-1."""
    if m.m_time < 2:
        raise ValidationError("need at least 2 columns to build pairs")
    return m.values[:, :-1], m.values[:, 1:]
