"""Small input checks shared across modules."""
from __future__ import annotations

import numpy as np


def as_vec3(v, name="vector", dtype=float) -> np.ndarray:
    arr = np.asarray(v, dtype=dtype)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_rows3(v, name="rows", dtype=float) -> np.ndarray:
    arr = np.asarray(v, dtype=dtype)
    if arr.ndim == 1 and arr.shape == (3,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"{name} must have shape (n, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_grid_index(i: int, name: str) -> int:
    if int(i) != i or not 0 <= int(i) <= 2:
        raise ValueError(f"{name} must be in {{0, 1, 2}}, got {i!r}")
    return int(i)


def check_square(mat, n: int, name="matrix") -> np.ndarray:
    arr = np.asarray(mat, dtype=complex)
    if arr.shape != (n, n):
        raise ValueError(f"{name} must be {n}x{n}, got {arr.shape}")
    return arr


def check_positive(x: float, name: str) -> float:
    x = float(x)
    if not np.isfinite(x) or x <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {x}")
    return x
