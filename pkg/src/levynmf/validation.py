"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_nonneg_matrix",
    "check_binary_mask",
    "check_positive",
    "check_same_shape",
]


def as_nonneg_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to a dense 2-D float array and verify nonnegativity."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    if np.any(arr < 0):
        raise ValueError(f"{name} must be nonnegative")
    return arr


def check_same_shape(A: np.ndarray, B: np.ndarray, names: str = "A/B") -> None:
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch for {names}: {A.shape} vs {B.shape}")


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_binary_mask(mask, shape, name: str = "mask") -> np.ndarray:
    """Validate a {0,1} trust mask of the given shape."""
    arr = np.asarray(mask, dtype=float)
    if arr.shape != tuple(shape):
        raise ValueError(f"{name} shape {arr.shape} does not match data shape {tuple(shape)}")
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError(f"{name} entries must all be 0 or 1")
    return arr
