"""Input validation helpers used throughout the package.

These are intentionally light-weight: they normalise array-likes to numpy
arrays with a predictable dtype/shape and raise :class:`ValidationError`
with a parameter name in the message, so CLI users see actionable errors.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def require_positive(name, value, strict=True):
    """Check that a scalar parameter is positive (or non-negative)."""
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if strict and value <= 0:
        raise ValidationError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")
    return value


def require_int(name, value, minimum=None, maximum=None):
    if not float(value).is_integer():
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ValidationError(f"{name} must be <= {maximum}, got {value}")
    return value


def as_vector(x, name="x", dim=None, dtype=complex):
    """Coerce to a 1-D array; optionally pin its length."""
    arr = np.atleast_1d(np.asarray(x, dtype=dtype))
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValidationError(f"{name} must have dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def as_snapshot_matrix(X, name="X", min_cols=1, dtype=None):
    """Coerce to a 2-D snapshot matrix (rows = state dims, columns = snapshots)."""
    arr = np.asarray(X)
    if dtype is None:
        dtype = complex if np.iscomplexobj(arr) else float
    arr = np.asarray(arr, dtype=dtype)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{name} is empty")
    if arr.shape[1] < min_cols:
        raise ValidationError(
            f"{name} needs at least {min_cols} columns, got {arr.shape[1]}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def realify(X):
    """Stack real and imaginary parts row-wise so Euclidean distances survive.

    For real input this is a no-op view suitable for ``cdist``.
    """
    if np.iscomplexobj(X):
        return np.vstack([X.real, X.imag])
    return X


def require_square_matrix(a, name="a"):
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr
