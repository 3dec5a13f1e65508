"""Input validation helpers shared by all modules.

These mirror the conventions of scikit-learn's ``check_array``: accept
anything array-like, hand back a float64 ndarray, and fail loudly with a
specific exception instead of letting NaNs propagate.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, NormalizationError, RangeError, ShapeError


def check_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate a real 2-D array: at least 1x1, all entries finite.

    Returns a float64 array (a view when the input already qualifies).
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have at least one row and one column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def check_vector(v, name: str = "vector") -> np.ndarray:
    """Validate a finite 1-D float vector."""
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if arr.size < 1:
        raise ShapeError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def check_unit_vector(q, length: int, tol: float = 1e-8, name: str = "q") -> np.ndarray:
    """Validate a direction vector of the given length with unit 2-norm."""
    arr = check_vector(q, name)
    if arr.size != length:
        raise ShapeError(f"{name} must have length {length}, got {arr.size}")
    nrm = float(np.linalg.norm(arr))
    if abs(nrm - 1.0) > tol:
        raise NormalizationError(f"{name} must be unit length (|norm - 1| = {abs(nrm - 1.0):.3g} > {tol:g})")
    return arr


def check_index_range(first: int, last: int, upper: int, name: str = "index range") -> None:
    """Validate a 1-based inclusive index range against an upper bound."""
    if not (1 <= first <= last <= upper):
        raise RangeError(f"{name} [{first}, {last}] must satisfy 1 <= first <= last <= {upper}")


def check_positive(value, name: str) -> None:
    if value <= 0:
        raise InvalidInputError(f"{name} must be positive, got {value}")


def check_nonnegative(value, name: str) -> None:
    if value < 0:
        raise InvalidInputError(f"{name} must be nonnegative, got {value}")
