"""CSV ingestion/emission and plain-ASCII PGM heatmaps.

All output is locale-independent: ``.`` decimals, 17 significant digits for
floats, and integer pixels for PGM, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import os

import numpy as np

from .data import DataMatrix
from .errors import ValidationError


def _parse_cell(cell: str):
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path, dt: float = 1.0) -> DataMatrix:
    """Load a rectangular numeric CSV as a snapshot matrix.

    Rows are spatial sensors, columns are time snapshots.  A single leading
    header row is skipped automatically when its cells are not numeric.
    """
    return DataMatrix(read_csv_values(path), dt=dt)


def read_csv_values(path) -> np.ndarray:
    """Load a rectangular numeric CSV as a bare float matrix."""
    if not os.path.exists(path):
        raise ValidationError(f"CSV file not found: {path}")
    rows: list[list[float]] = []
    header_skipped = False
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, record in enumerate(reader, start=1):
            if not record or all(not c.strip() for c in record):
                continue
            parsed = [_parse_cell(c.strip()) for c in record]
            if any(v is None for v in parsed):
                if lineno == 1 and not header_skipped:
                    header_skipped = True
                    continue
                col = next(i for i, v in enumerate(parsed) if v is None)
                raise ValidationError(
                    f"{path}: non-numeric cell at line {lineno}, column {col}"
                )
            if rows and len(parsed) != len(rows[0]):
                raise ValidationError(
                    f"{path}: ragged row at line {lineno} "
                    f"({len(parsed)} cells, expected {len(rows[0])})"
                )
            rows.append(parsed)
    if not rows:
        raise ValidationError(f"{path}: no numeric data")
    values = np.asarray(rows, dtype=float)
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        r, c = bad[0]
        raise ValidationError(f"{path}: non-finite value at row {r}, column {c}")
    return values


def format_float(v: float) -> str:
    return f"{float(v):.17g}"


def save_csv(values, path):
    """Write a real matrix (or vector as a single column) as CSV."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    buf = io.StringIO()
    for row in arr:
        buf.write(",".join(format_float(v) for v in row))
        buf.write("\r\n")
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(buf.getvalue())


def save_heatmap_pgm(values, path):
    """Write a min-max normalised plain PGM ("P2", 255 gray levels).

    Accepts a matrix, a vector, or a DataMatrix.  A constant input maps
    every pixel to 128.  Output is bit-exact for identical input.
    """
    arr = np.asarray(getattr(values, "values", values), dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValidationError(f"heatmap input must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("heatmap input contains non-finite values")
    vmin, vmax = float(arr.min()), float(arr.max())
    if vmax - vmin <= 0.0:
        pixels = np.full(arr.shape, 128, dtype=int)
    else:
        pixels = np.rint((arr - vmin) / (vmax - vmin) * 255.0).astype(int)
    h, w = pixels.shape
    lines = [f"P2", f"{w} {h}", "255"]
    for row in pixels:
        lines.append(" ".join(str(int(p)) for p in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
