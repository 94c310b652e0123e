"""Pseudo-label generation and edge-map post-processing.

Pseudo-labels weight the Laplacian zero-crossing bands of depth and
surface normals by their (normalized) gradient magnitudes, producing the
two supervision maps for an edge estimator. Post-processing turns a
continuous edge probability map into a thin binary contour: hysteresis
thresholding, non-maximum suppression along the gradient direction,
pixelwise combination, then morphological cleanup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi
from skimage.draw import line as draw_line

from .errors import BadThresholds, EmptyResult
from .grids import dilate3x3, forward_diff, laplacian
from .reproject import Intrinsics, backproject
from .validation import (
    check_binary_mask,
    check_positive_depth,
    check_same_shape,
    check_scalar_grid,
    check_unit_normals,
)

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class PseudoLabelPair:
    """Depth and normal weight maps; each sums to 1 unless its
    zero-crossing band is empty, in which case it is all-zero and the
    matching flag is set."""

    w_d: np.ndarray
    w_n: np.ndarray
    depth_empty: bool = False
    normal_empty: bool = False


def zero_crossings(lap) -> np.ndarray:
    """Mark pixels whose Laplacian changes sign against a forward neighbour.

    The product test is strict, so exact zeros never flag a crossing.
    """
    arr = check_scalar_grid(lap)
    out = np.zeros(arr.shape, dtype=np.uint8)
    out[:-1, :] |= (arr[:-1, :] * arr[1:, :] < 0).astype(np.uint8)
    out[:, :-1] |= (arr[:, :-1] * arr[:, 1:] < 0).astype(np.uint8)
    return out


def norm_depth_grad(depth) -> np.ndarray:
    """Scale-invariant depth gradient magnitude |dx| + |dy|.

    Each forward difference is divided by the larger of the two depths it
    touches, which bounds the output by 2 and removes the bias towards
    large depth values.
    """
    d = check_positive_depth(depth)
    gx = np.zeros_like(d)
    gy = np.zeros_like(d)
    gx[:, :-1] = (d[:, 1:] - d[:, :-1]) / np.maximum(d[:, 1:], d[:, :-1])
    gy[:-1, :] = (d[1:, :] - d[:-1, :]) / np.maximum(d[1:, :], d[:-1, :])
    return np.abs(gx) + np.abs(gy)


def normal_gap(normals) -> np.ndarray:
    """Dot-product discrepancy of a unit normal field, |dx| + |dy| style.

    Per axis the gap is 1 - |<n(p + step), n(p)>|, zero on the trailing
    edge.
    """
    n = check_unit_normals(normals)
    gx = np.zeros(n.shape[:2])
    gy = np.zeros(n.shape[:2])
    gx[:, :-1] = 1.0 - np.abs(np.sum(n[:, 1:, :] * n[:, :-1, :], axis=2))
    gy[:-1, :] = 1.0 - np.abs(np.sum(n[1:, :, :] * n[:-1, :, :], axis=2))
    return np.abs(gx) + np.abs(gy)


def _vector_zero_crossings(field: np.ndarray) -> np.ndarray:
    """Union of per-component Laplacian zero-crossings of a vector field."""
    out = np.zeros(field.shape[:2], dtype=np.uint8)
    for c in range(field.shape[2]):
        out |= zero_crossings(laplacian(field[:, :, c]))
    return out


def pseudo_labels(depth, normals) -> PseudoLabelPair:
    """Weighted depth and normal pseudo-labels.

    Each modality masks its gradient magnitude by the dilated Laplacian
    zero-crossing band and normalizes to unit sum. An empty band yields an
    all-zero map with the corresponding flag raised.
    """
    d = check_positive_depth(depth)
    n = check_unit_normals(normals)
    check_same_shape(d, n[:, :, 0], "depth and normals")

    z_d = dilate3x3(zero_crossings(laplacian(d)))
    z_n = dilate3x3(_vector_zero_crossings(n))

    raw_d = z_d * norm_depth_grad(d)
    raw_n = z_n * normal_gap(n)

    sum_d = raw_d.sum()
    sum_n = raw_n.sum()
    w_d = raw_d / sum_d if sum_d > 0 else np.zeros_like(raw_d)
    w_n = raw_n / sum_n if sum_n > 0 else np.zeros_like(raw_n)
    return PseudoLabelPair(
        w_d=w_d, w_n=w_n, depth_empty=sum_d == 0, normal_empty=sum_n == 0
    )


def normals_from_depth(depth, intrinsics: Intrinsics) -> np.ndarray:
    """Unit surface normals from back-projected depth.

    The normal is the cross product of the forward-difference tangents of
    the back-projected point cloud, oriented towards the camera (negative
    z). The trailing row/column replicate their nearest interior normal.
    """
    d = check_positive_depth(depth)
    pts = backproject(d, intrinsics)
    tx = pts[:, 1:, :] - pts[:, :-1, :]
    ty = pts[1:, :, :] - pts[:-1, :, :]
    inner = np.cross(tx[:-1, :, :], ty[:, :-1, :])
    norms = np.linalg.norm(inner, axis=2, keepdims=True)
    norms[norms == 0] = 1.0
    inner = inner / norms
    flip = inner[:, :, 2] > 0
    inner[flip] = -inner[flip]

    out = np.empty_like(pts)
    out[:-1, :-1, :] = inner
    out[:-1, -1, :] = inner[:, -1, :]
    out[-1, :-1, :] = inner[-1, :, :]
    out[-1, -1, :] = inner[-1, -1, :]
    return out


def hysteresis(edge, low: float, high: float) -> np.ndarray:
    """Keep pixels >= low that are 8-connected to a pixel >= high.

    ``edge`` is expected on the [0, 255] scale.
    """
    e = check_scalar_grid(edge)
    if not low < high:
        raise BadThresholds(f"need low < high, got low={low}, high={high}")
    weak = e >= low
    strong = e >= high
    labels, count = ndi.label(weak, structure=EIGHT_CONNECTED)
    if count == 0:
        return np.zeros(e.shape, dtype=np.uint8)
    strong_labels = np.unique(labels[strong])
    strong_labels = strong_labels[strong_labels > 0]
    keep = np.isin(labels, strong_labels) & weak
    return keep.astype(np.uint8)


def _bilinear_at(e: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample e at float coordinates (x = column, y = row), clamped."""
    h, w = e.shape
    x = np.clip(x, 0.0, w - 1.0)
    y = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    top = e[y0, x0] * (1 - fx) + e[y0, x1] * fx
    bot = e[y1, x0] * (1 - fx) + e[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def nms_gradient(edge) -> np.ndarray:
    """Non-maximum suppression along the (forward-difference) gradient.

    A pixel survives when it is strictly greater than the bilinear sample
    one unit uphill and at least as large as the sample downhill; pixels
    with zero gradient are suppressed, which removes plateaus entirely.
    """
    e = check_scalar_grid(edge)
    gx = forward_diff(e, "x")
    gy = forward_diff(e, "y")
    mag = np.hypot(gx, gy)
    active = mag > 0
    ux = np.where(active, gx / np.where(active, mag, 1.0), 0.0)
    uy = np.where(active, gy / np.where(active, mag, 1.0), 0.0)

    jj, ii = np.meshgrid(np.arange(e.shape[1]), np.arange(e.shape[0]))
    up = _bilinear_at(e, jj + ux, ii + uy)
    down = _bilinear_at(e, jj - ux, ii - uy)
    keep = active & (e > up) & (e >= down)
    return keep.astype(np.uint8)


def edge_binary(edge_h, edge_n) -> np.ndarray:
    """Pixelwise AND of the hysteresis and suppression masks."""
    a = check_binary_mask(edge_h, "edge_h")
    b = check_binary_mask(edge_n, "edge_n")
    check_same_shape(a, b, "edge masks")
    return (a & b).astype(np.uint8)


def _endpoints(mask: np.ndarray) -> list[tuple[int, int]]:
    """Pixels with at most one 8-connected neighbour inside the mask."""
    neighbours = ndi.convolve(
        mask.astype(np.int32), np.ones((3, 3), dtype=np.int32), mode="constant"
    ) - mask
    ys, xs = np.nonzero((mask == 1) & (neighbours <= 1))
    return list(zip(ys.tolist(), xs.tolist()))


def refine(mask, min_component: int = 20, gap_max: int = 3) -> np.ndarray:
    """Morphological cleanup of a binary contour.

    Applies a 3x3 closing, drops 8-connected components smaller than
    ``min_component`` pixels, then bridges open endpoints to the nearest
    non-adjacent contour pixel within ``gap_max`` (chessboard) with a
    straight segment.
    """
    m = check_binary_mask(mask)
    closed = ndi.binary_closing(m.astype(bool), structure=EIGHT_CONNECTED)
    closed |= m.astype(bool)  # closing never removes original pixels

    labels, count = ndi.label(closed, structure=EIGHT_CONNECTED)
    if count:
        sizes = np.bincount(labels.ravel())
        sizes[0] = 0
        closed &= sizes[labels] >= min_component
    out = closed.astype(np.uint8)

    for (ey, ex) in _endpoints(out):
        y0 = max(0, ey - gap_max)
        y1 = min(out.shape[0], ey + gap_max + 1)
        x0 = max(0, ex - gap_max)
        x1 = min(out.shape[1], ex + gap_max + 1)
        best = None
        for yy in range(y0, y1):
            for xx in range(x0, x1):
                if out[yy, xx] == 0:
                    continue
                cheb = max(abs(yy - ey), abs(xx - ex))
                if cheb < 2:  # itself or an already-connected neighbour
                    continue
                d2 = (yy - ey) ** 2 + (xx - ex) ** 2
                key = (d2, yy, xx)
                if best is None or key < best:
                    best = key
        if best is not None:
            rr, cc = draw_line(ey, ex, best[1], best[2])
            out[rr, cc] = 1
    return out


def postprocess(
    edge,
    low: float = 80.0,
    high: float = 100.0,
    min_component: int = 20,
    gap_max: int = 3,
) -> np.ndarray:
    """Continuous edge map in [0, 1] to a thin binary contour.

    Composition of hysteresis on the 255-scaled map, gradient NMS,
    pixelwise AND, then ``refine``. Raises ``EmptyResult`` when nothing
    survives.
    """
    e = check_scalar_grid(edge)
    if e.min() < 0 or e.max() > 1:
        raise ValueError("edge map must lie in [0, 1]")
    eh = hysteresis(255.0 * e, low, high)
    en = nms_gradient(e)
    combined = edge_binary(eh, en)
    refined = refine(combined, min_component=min_component, gap_max=gap_max)
    if refined.sum() == 0:
        raise EmptyResult("post-processing removed every contour pixel")
    return refined
