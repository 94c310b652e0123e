"""Input validation helpers shared by all modules.

The library represents its grid types as plain numpy arrays:

- scalar grid: float array of shape (H, W)
- binary mask: uint8 array of shape (H, W) with values in {0, 1}
- multi-channel image: float array of shape (H, W, C) with values in [0, 1]
- vector field: float array of shape (H, W, dim), dim in {2, 3}

The ``check_*`` functions coerce array-likes into those conventions and
raise the matching domain error when an invariant cannot hold.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatch,
    NonPositiveDepth,
    NotUnitNormals,
)

UNIT_NORM_TOL = 1e-4


def check_scalar_grid(g, name: str = "grid") -> np.ndarray:
    """Coerce to a finite float64 (H, W) array."""
    arr = np.asarray(g, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_binary_mask(m, name: str = "mask") -> np.ndarray:
    """Coerce to a uint8 (H, W) array with values in {0, 1}."""
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    out = arr.astype(np.uint8, copy=True)
    if not np.array_equal(out, arr) or not np.isin(out, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return out


def check_image(img, name: str = "image") -> np.ndarray:
    """Coerce to a float64 (H, W, C) array with values in [0, 1].

    A 2-d array is promoted to a single channel.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
        raise ValueError(f"{name} must be a (H, W, C) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return arr


def check_vector_field(field, dim: int | None = None, name: str = "field") -> np.ndarray:
    arr = np.asarray(field, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] not in (2, 3):
        raise ValueError(f"{name} must be a (H, W, 2|3) array, got shape {arr.shape}")
    if dim is not None and arr.shape[2] != dim:
        raise ValueError(f"{name} must have dim={dim}, got {arr.shape[2]}")
    return arr


def check_unit_normals(field, name: str = "normals") -> np.ndarray:
    """Validate a 3-d normal field with per-pixel unit Euclidean norm."""
    arr = check_vector_field(field, dim=3, name=name)
    norms = np.linalg.norm(arr, axis=2)
    worst = np.abs(norms - 1.0).max()
    if worst > UNIT_NORM_TOL:
        raise NotUnitNormals(
            f"{name} norm deviates from 1 by {worst:.3g} (> {UNIT_NORM_TOL:g})"
        )
    return arr


def check_positive_depth(depth, name: str = "depth") -> np.ndarray:
    arr = check_scalar_grid(depth, name=name)
    if arr.min() <= 0.0:
        raise NonPositiveDepth(f"{name} must be strictly positive everywhere")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, names: str = "operands") -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{names} differ in shape: {a.shape} vs {b.shape}")
