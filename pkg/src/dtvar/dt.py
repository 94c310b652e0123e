"""Distance transforms, the remap family and random-walk encoding.

Three routes to the distance field are provided:

- ``brute_force_dt``: direct minimum over all contour pixels, O(H*W*|C|).
  Slow but trivially correct; it is the oracle every other route is
  tested against.
- ``chamfer_d8``: two-pass chessboard transform. The scans match the
  sequential forward/backward recurrences exactly (the in-row propagation
  is evaluated with a running-minimum identity, which is an algebraic
  rewrite, not an approximation).
- ``exact_edt``: exact Euclidean transform via the two-phase
  lower-envelope-of-parabolas method on squared distances.

``remap`` applies a bounded 1-d function to the max-normalized field and
``rw_encode`` lifts integer distance values onto a fixed-step random walk,
one output channel per walk dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadDimension, EmptyContour, PathTooShort
from .grids import forward_diff
from .validation import check_binary_mask, check_scalar_grid

_METRICS = ("chessboard", "euclidean")


def _contour_coords(contour: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.nonzero(contour)
    if rows.size == 0:
        raise EmptyContour("contour has no set pixel")
    return rows, cols


def brute_force_dt(contour, metric: str = "chessboard") -> np.ndarray:
    """Distance to the nearest contour pixel by exhaustive minimum.

    Parameters
    ----------
    contour : binary mask (H, W)
        Must contain at least one set pixel.
    metric : {"chessboard", "euclidean"}

    Returns
    -------
    (H, W) float64 grid; zero exactly on contour pixels.
    """
    mask = check_binary_mask(contour)
    if metric not in _METRICS:
        raise ValueError(f"metric must be one of {_METRICS}, got {metric!r}")
    rows, cols = _contour_coords(mask)
    h, w = mask.shape
    # |di| and |dj| tables, reduced over contour pixels in chunks to bound
    # the working set on dense contours. Narrow dtypes keep the broadcast
    # cheap on small grids.
    small = max(h, w) <= 256
    itype = np.uint8 if small else np.int32
    ii = np.arange(h, dtype=np.int32)
    jj = np.arange(w, dtype=np.int32)
    out = None
    chunk = max(1, 4_000_000 // (h * w))
    for start in range(0, rows.size, chunk):
        r = rows[start : start + chunk].astype(np.int32)
        c = cols[start : start + chunk].astype(np.int32)
        di = np.abs(ii[:, None] - r[None, :]).astype(itype)  # (H, k)
        dj = np.abs(jj[:, None] - c[None, :]).astype(itype)  # (W, k)
        if metric == "chessboard":
            cand = np.minimum.reduce(
                np.maximum(di[:, None, :], dj[None, :, :]), axis=2
            ).astype(np.float64)
        else:
            d2 = di.astype(np.int64) ** 2
            e2 = dj.astype(np.int64) ** 2
            cand = np.sqrt(
                np.minimum.reduce(d2[:, None, :] + e2[None, :, :], axis=2).astype(
                    np.float64
                )
            )
        out = cand if out is None else np.minimum(out, cand)
    return out


def chamfer_d8(contour) -> np.ndarray:
    """Two-pass chessboard distance transform.

    Forward pass scans top-to-bottom, taking the four causal neighbours
    plus one; the backward pass scans bottom-to-top with the four
    anti-causal neighbours, taking the minimum with the current value.
    Equals ``brute_force_dt(contour, "chessboard")`` exactly.
    """
    mask = check_binary_mask(contour)
    _contour_coords(mask)
    h, w = mask.shape
    inf = np.inf
    f = np.full((h, w), inf)
    on = mask == 1
    cols = np.arange(w, dtype=np.float64)

    def _scan_left_to_right(a):
        # min over k <= j of a[k] + (j - k), via a running minimum of a[k] - k
        return cols + np.minimum.accumulate(a - cols)

    def _scan_right_to_left(a):
        return -cols + np.minimum.accumulate((a + cols)[::-1])[::-1]

    for i in range(h):
        if i == 0:
            cand = np.full(w, inf)
        else:
            prev = f[i - 1]
            cand = prev.copy()
            cand[1:] = np.minimum(cand[1:], prev[:-1])
            cand[:-1] = np.minimum(cand[:-1], prev[1:])
            cand = cand + 1.0
        a = np.where(on[i], 0.0, cand)
        f[i] = _scan_left_to_right(a)

    for i in range(h - 1, -1, -1):
        if i == h - 1:
            cand = np.full(w, inf)
        else:
            nxt = f[i + 1]
            cand = nxt.copy()
            cand[1:] = np.minimum(cand[1:], nxt[:-1])
            cand[:-1] = np.minimum(cand[:-1], nxt[1:])
            cand = cand + 1.0
        b = np.minimum(f[i], cand)
        f[i] = _scan_right_to_left(b)

    return f


def _edt_1d_envelope(f: np.ndarray, out: np.ndarray) -> None:
    """Lower envelope of parabolas j -> f[q] + (j - q)^2 along one line."""
    n = f.shape[0]
    v = np.empty(n, dtype=np.int64)  # parabola apexes
    z = np.empty(n + 1, dtype=np.float64)  # envelope breakpoints
    k = -1
    for q in range(n):
        fq = f[q]
        if fq == np.inf:
            continue
        while k >= 0:
            p = v[k]
            s = (fq + q * q - (f[p] + p * p)) / (2.0 * (q - p))
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = -np.inf if k == 0 else s
        z[k + 1] = np.inf
    k = 0
    for j in range(n):
        while z[k + 1] < j:
            k += 1
        p = v[k]
        out[j] = (j - p) ** 2 + f[p]


def exact_edt(contour) -> np.ndarray:
    """Exact Euclidean distance transform.

    Column pass computes squared vertical distances to the nearest contour
    pixel in each column; the row pass takes the lower envelope of the
    induced parabolas. Matches ``brute_force_dt(contour, "euclidean")``
    to within floating-point rounding of the final square root.
    """
    mask = check_binary_mask(contour)
    _contour_coords(mask)
    h, w = mask.shape
    inf = np.inf

    # vertical pass: |di| to nearest set pixel in the same column, two sweeps
    d = np.where(mask == 1, 0.0, inf)
    for i in range(1, h):
        d[i] = np.minimum(d[i], d[i - 1] + 1.0)
    for i in range(h - 2, -1, -1):
        d[i] = np.minimum(d[i], d[i + 1] + 1.0)
    sq = d * d

    out = np.empty_like(sq)
    row_out = np.empty(w, dtype=np.float64)
    for i in range(h):
        _edt_1d_envelope(sq[i], row_out)
        out[i] = row_out
    return np.sqrt(out)


def eikonal_residual(dt) -> float:
    """Largest forward-difference magnitude of a distance field.

    Valid chamfer output never exceeds 1; larger values flag fields that
    are not distance transforms.
    """
    arr = check_scalar_grid(dt)
    fx = forward_diff(arr, "x")[:, :-1] if arr.shape[1] > 1 else np.zeros((arr.shape[0], 0))
    fy = forward_diff(arr, "y")[:-1, :] if arr.shape[0] > 1 else np.zeros((0, arr.shape[1]))
    worst = 0.0
    if fx.size:
        worst = max(worst, float(np.abs(fx).max()))
    if fy.size:
        worst = max(worst, float(np.abs(fy).max()))
    return worst


# -- remap family -------------------------------------------------------------


@dataclass(frozen=True)
class RemapFunction:
    """Bounded 1-d function applied to the normalized distance field.

    ``k1`` and ``k2`` are the suprema of |g'| and |g''| on [0, 1], used by
    the verification harness.
    """

    tag: str
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    second_deriv: Callable[[np.ndarray], np.ndarray]
    k1: float
    k2: float

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=np.float64))


REMAP_FUNCTIONS = {
    "identity": RemapFunction(
        "identity",
        lambda x: x,
        lambda x: np.ones_like(x),
        lambda x: np.zeros_like(x),
        k1=1.0,
        k2=0.0,
    ),
    "square": RemapFunction(
        "square",
        lambda x: x * x,
        lambda x: 2.0 * x,
        lambda x: np.full_like(x, 2.0),
        k1=2.0,
        k2=2.0,
    ),
    "sine": RemapFunction(
        "sine",
        lambda x: np.sin(np.pi * x),
        lambda x: np.pi * np.cos(np.pi * x),
        lambda x: -np.pi * np.pi * np.sin(np.pi * x),
        k1=np.pi,
        k2=np.pi * np.pi,
    ),
    "parabola": RemapFunction(
        "parabola",
        lambda x: 4.0 * x * (1.0 - x),
        lambda x: 4.0 - 8.0 * x,
        lambda x: np.full_like(x, -8.0),
        k1=4.0,
        k2=8.0,
    ),
}


def remap_function(tag: str) -> RemapFunction:
    try:
        return REMAP_FUNCTIONS[tag]
    except KeyError:
        raise ValueError(
            f"unknown remap function {tag!r}; choose from {sorted(REMAP_FUNCTIONS)}"
        ) from None


def remap(dt, g: RemapFunction | str) -> np.ndarray:
    """Normalize a nonnegative field by its maximum and apply g pointwise.

    A zero field maps to g(0) everywhere.
    """
    arr = check_scalar_grid(dt)
    if arr.min() < 0:
        raise ValueError("distance field must be nonnegative")
    if isinstance(g, str):
        g = remap_function(g)
    peak = arr.max()
    unit = arr / peak if peak > 0 else arr
    return g(unit)


# -- random walk ---------------------------------------------------------------


@dataclass(frozen=True)
class RandomWalkPath:
    """Fixed-step random walk, reproducible from its parameters.

    ``points`` has shape (steps + 1, dim) with the origin first; every
    consecutive pair is exactly ``eps`` apart.
    """

    dim: int
    points: np.ndarray
    eps: float
    partitions: int
    seed: int

    @property
    def steps(self) -> int:
        return self.points.shape[0] - 1


def make_rw_path(
    dim: int, steps: int, eps: float, partitions: int, seed: int
) -> RandomWalkPath:
    """Sample a random walk with steps drawn from discretized angle bins.

    Each angular coordinate is restricted to ``partitions`` values: full
    turns use 2*pi*i/k, half-range polar angles use bin centres
    (i + 0.5)*pi/k. Dimension 1 degenerates to coin-flip signs.
    """
    if dim not in (1, 2, 3, 4):
        raise BadDimension(f"dim must be in 1..4, got {dim}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if partitions < 2:
        raise ValueError("partitions must be >= 2")

    rng = np.random.default_rng(seed)
    k = partitions
    if dim == 1:
        sign = rng.integers(0, 2, size=steps) * 2 - 1
        dirs = sign[:, None].astype(np.float64)
    elif dim == 2:
        theta = 2.0 * np.pi * rng.integers(0, k, size=steps) / k
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    elif dim == 3:
        polar = np.pi * (rng.integers(0, k, size=steps) + 0.5) / k
        azim = 2.0 * np.pi * rng.integers(0, k, size=steps) / k
        sp = np.sin(polar)
        dirs = np.stack([sp * np.cos(azim), sp * np.sin(azim), np.cos(polar)], axis=1)
    else:
        a1 = np.pi * (rng.integers(0, k, size=steps) + 0.5) / k
        a2 = np.pi * (rng.integers(0, k, size=steps) + 0.5) / k
        a3 = 2.0 * np.pi * rng.integers(0, k, size=steps) / k
        s1, s2 = np.sin(a1), np.sin(a2)
        dirs = np.stack(
            [
                np.cos(a1),
                s1 * np.cos(a2),
                s1 * s2 * np.cos(a3),
                s1 * s2 * np.sin(a3),
            ],
            axis=1,
        )

    pts = np.zeros((steps + 1, dim))
    np.cumsum(eps * dirs, axis=0, out=pts[1:])
    pts.setflags(write=False)
    return RandomWalkPath(dim=dim, points=pts, eps=eps, partitions=partitions, seed=seed)


def rw_encode(dt, path: RandomWalkPath) -> np.ndarray:
    """Map integer distance values onto walk positions, one channel per dim.

    Channels are rescaled to [0, 1] with the path-global minimum and
    maximum so that encodings of different frames sharing a path remain
    comparable. A channel whose path span is zero encodes as zeros.
    """
    arr = check_scalar_grid(dt)
    idx = np.rint(arr).astype(np.int64)
    if np.abs(arr - idx).max() > 1e-9:
        raise ValueError("rw_encode expects an integer-valued distance field")
    if idx.min() < 0:
        raise ValueError("distance field must be nonnegative")
    if idx.max() > path.steps:
        raise PathTooShort(
            f"max distance {idx.max()} exceeds path length {path.steps}"
        )
    lo = path.points.min(axis=0)
    hi = path.points.max(axis=0)
    span = hi - lo
    scale = np.where(span > 0, 1.0 / np.where(span > 0, span, 1.0), 0.0)
    encoded = (path.points[idx] - lo) * scale
    return encoded
