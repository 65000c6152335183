"""Small input validation helpers used by the computational modules."""

from __future__ import annotations

import numpy as np

from ._exceptions import DimensionError


def as_vector(x, name: str, *, require_finite: bool = True) -> np.ndarray:
    """Coerce `x` to a read-only 1-D float64 array."""
    arr = np.array(x, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise DimensionError(name, f"expected a 1-D array, got shape {arr.shape}")
    if require_finite and not np.all(np.isfinite(arr)):
        raise DimensionError(name, "contains NaN or infinite entries")
    arr.flags.writeable = False
    return arr


def as_matrix(x, name: str, *, require_finite: bool = True) -> np.ndarray:
    """Coerce `x` to a read-only 2-D float64 array."""
    arr = np.array(x, dtype=np.float64, copy=True)
    if arr.ndim != 2:
        raise DimensionError(name, f"expected a 2-D array, got shape {arr.shape}")
    if require_finite and not np.all(np.isfinite(arr)):
        raise DimensionError(name, "contains NaN or infinite entries")
    arr.flags.writeable = False
    return arr


def check_length(arr: np.ndarray, expected: int, name: str) -> None:
    if arr.shape[0] != expected:
        raise DimensionError(name, f"expected length {expected}, got {arr.shape[0]}")


def check_index(index: int, size: int, name: str) -> int:
    index = int(index)
    if not 0 <= index < size:
        raise DimensionError(name, f"index {index} out of range [0, {size})")
    return index
