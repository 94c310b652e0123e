"""Deterministic synthetic shapes for the verification experiments.

Every generator returns a filled interior mask together with its boundary
contour (interior pixels with an 8-neighbour outside). Shapes are fully
reproducible from their spec and keep a margin to the grid border so that
shifted copies stay in-bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi
from shapely.geometry import Polygon
from skimage.draw import polygon as draw_polygon

from ..errors import DegenerateShape
from ..validation import check_binary_mask

_KINDS = ("rectangle", "star", "polygon", "disk")


@dataclass(frozen=True)
class ShapeSpec:
    """Recipe for one synthetic shape.

    ``params`` means: vertex count for polygons, point count for stars,
    aspect ratio (width/height) for rectangles; it is ignored for disks.
    """

    kind: str
    size: int
    params: float = 0.0
    seed: int = 0
    margin: int = 2

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.size < 16:
            raise ValueError("size must be >= 16")


def _boundary(interior: np.ndarray) -> np.ndarray:
    eroded = ndi.binary_erosion(
        interior.astype(bool), structure=np.ones((3, 3), dtype=bool)
    )
    return (interior.astype(bool) & ~eroded).astype(np.uint8)


def _rect_mask(size: int, aspect: float, rng: np.random.Generator, margin: int):
    span = size - 2 * margin
    h = int(rng.integers(span // 3, max(span // 3 + 1, (2 * span) // 3)))
    w = int(np.clip(round(h * aspect), 4, span)) if aspect > 0 else int(
        rng.integers(span // 3, max(span // 3 + 1, (2 * span) // 3))
    )
    h = max(h, 4)
    top = int(rng.integers(margin, size - margin - h + 1))
    left = int(rng.integers(margin, size - margin - w + 1))
    mask = np.zeros((size, size), dtype=np.uint8)
    mask[top : top + h, left : left + w] = 1
    return mask


def _raster_polygon(ys, xs, size: int) -> np.ndarray:
    mask = np.zeros((size, size), dtype=np.uint8)
    rr, cc = draw_polygon(ys, xs, shape=(size, size))
    mask[rr, cc] = 1
    return mask


def _star_vertices(size: int, points: int, rng: np.random.Generator, margin: int):
    centre = size / 2.0
    outer = (size / 2.0 - margin) * rng.uniform(0.8, 1.0)
    inner = outer * rng.uniform(0.4, 0.6)
    phase = rng.uniform(0, 2 * np.pi)
    angles = phase + np.arange(2 * points) * np.pi / points
    radii = np.where(np.arange(2 * points) % 2 == 0, outer, inner)
    ys = centre + radii * np.sin(angles)
    xs = centre + radii * np.cos(angles)
    return ys, xs


def _random_simple_polygon(size: int, vertices: int, rng: np.random.Generator, margin: int):
    for _ in range(200):
        ys = rng.uniform(margin, size - 1 - margin, size=vertices)
        xs = rng.uniform(margin, size - 1 - margin, size=vertices)
        poly = Polygon(zip(xs, ys))
        if not (poly.is_simple and poly.area >= 9.0):
            continue
        mask = _raster_polygon(ys, xs, size)
        # thin slivers can rasterize disconnected or without interior
        _, count = ndi.label(mask, structure=np.ones((3, 3), dtype=bool))
        if count == 1 and (mask.sum() - _boundary(mask).sum()) > 0:
            return ys, xs
    raise DegenerateShape("could not sample a simple polygon")


def gen_shape(spec: ShapeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Generate ``(interior, contour)`` masks for a shape spec."""
    rng = np.random.default_rng(spec.seed)
    size, margin = spec.size, spec.margin
    if spec.kind == "rectangle":
        interior = _rect_mask(size, spec.params, rng, margin)
    elif spec.kind == "disk":
        centre = (size - 1) / 2.0
        radius = (size / 2.0 - margin) * rng.uniform(0.85, 1.0)
        jj, ii = np.meshgrid(np.arange(size), np.arange(size))
        interior = (
            ((ii - centre) ** 2 + (jj - centre) ** 2) <= radius * radius
        ).astype(np.uint8)
    elif spec.kind == "star":
        points = max(3, int(spec.params) or 5)
        ys, xs = _star_vertices(size, points, rng, margin)
        interior = _raster_polygon(ys, xs, size)
    else:
        vertices = max(3, int(spec.params) or 6)
        ys, xs = _random_simple_polygon(size, vertices, rng, margin)
        interior = _raster_polygon(ys, xs, size)

    if interior.sum() == 0 or (interior.sum() - _boundary(interior).sum()) == 0:
        raise DegenerateShape(f"{spec.kind} shape has an empty interior")
    _, count = ndi.label(interior, structure=np.ones((3, 3), dtype=bool))
    if count != 1:
        raise DegenerateShape(f"{spec.kind} shape rasterized into {count} components")
    return interior, _boundary(interior)


def shift_mask(mask, shift: tuple[int, int]) -> np.ndarray:
    """Translate a mask by integer (dy, dx), zero-filling uncovered pixels.

    Raises if any set pixel would leave the grid.
    """
    m = check_binary_mask(mask)
    dy, dx = int(shift[0]), int(shift[1])
    h, w = m.shape
    ys, xs = np.nonzero(m)
    if ys.size:
        if (
            ys.min() + dy < 0
            or ys.max() + dy >= h
            or xs.min() + dx < 0
            or xs.max() + dx >= w
        ):
            raise ValueError(f"shift {shift} pushes the mask out of bounds")
    out = np.zeros_like(m)
    out[ys + dy, xs + dx] = 1
    return out
