"""Discrete stencil operators on (H, W) grids.

Conventions used throughout the package: row-major storage, origin at the
top-left corner, the x axis is the column direction and the y axis the row
direction. Forward differences look at p+(0,1) for x and p+(1,0) for y and
write 0 on the trailing edge, as if the grid were replicated past it.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage as ndi

from .errors import DimensionTooSmall
from .validation import check_binary_mask, check_scalar_grid


def forward_diff(g, axis: str) -> np.ndarray:
    """Forward difference g(p + unit(axis)) - g(p) with zero trailing edge.

    Parameters
    ----------
    g : array-like of shape (H, W)
    axis : {"x", "y"}
        "x" differentiates along columns, "y" along rows.
    """
    arr = check_scalar_grid(g)
    out = np.zeros_like(arr)
    if axis == "x":
        out[:, :-1] = arr[:, 1:] - arr[:, :-1]
    elif axis == "y":
        out[:-1, :] = arr[1:, :] - arr[:-1, :]
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return out


def laplacian(g) -> np.ndarray:
    """5-point Laplacian with a zero one-pixel border.

    Requires at least a 3x3 grid so the stencil has an interior.
    """
    arr = check_scalar_grid(g)
    h, w = arr.shape
    if h < 3 or w < 3:
        raise DimensionTooSmall(f"laplacian needs at least 3x3, got {h}x{w}")
    out = np.zeros_like(arr)
    out[1:-1, 1:-1] = (
        arr[2:, 1:-1]
        + arr[:-2, 1:-1]
        + arr[1:-1, 2:]
        + arr[1:-1, :-2]
        - 4.0 * arr[1:-1, 1:-1]
    )
    return out


def dilate3x3(m) -> np.ndarray:
    """Binary dilation by a 3x3 structuring element.

    Border pixels use the in-bounds part of their window.
    """
    mask = check_binary_mask(m)
    return ndi.maximum_filter(mask, size=3, mode="constant", cval=0)
