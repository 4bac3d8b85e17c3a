"""Snapshot data container.

A :class:`DataMatrix` holds real snapshot data with rows indexing spatial
sensors and columns indexing time, sampled at a fixed interval ``dt``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass
class DataMatrix:
    """Real snapshot matrix: rows are spatial sensors, columns are snapshots."""

    values: np.ndarray
    dt: float = 1.0
    space_labels: list | None = None
    time_labels: list | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[None, :]
        if self.values.ndim != 2:
            raise ValidationError(
                f"snapshot values must be 2-D, got shape {self.values.shape}"
            )
        if self.values.shape[1] < 2:
            raise ValidationError(
                f"need at least 2 snapshots, got {self.values.shape[1]}"
            )
        if not np.all(np.isfinite(self.values)):
            bad = np.argwhere(~np.isfinite(self.values))[0]
            raise ValidationError(
                f"non-finite entry at row {bad[0]}, column {bad[1]}"
            )
        if self.dt <= 0 or not np.isfinite(self.dt):
            raise ValidationError(f"dt must be positive, got {self.dt!r}")
        if self.space_labels is not None and len(self.space_labels) != self.values.shape[0]:
            raise ValidationError("space_labels length does not match row count")
        if self.time_labels is not None and len(self.time_labels) != self.values.shape[1]:
            raise ValidationError("time_labels length does not match column count")

    @property
    def n_space(self) -> int:
        return self.values.shape[0]

    @property
    def m_time(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]
