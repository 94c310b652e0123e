"""Sampled Lipschitz/smoothness bounds and convexity of the matching loss.

The pointwise loss compared here is l(u) = (g(d(u)) - g(d(y)))^2 where d
is the max-normalized Euclidean distance field, bilinearly interpolated
between pixels, and y is the ground-truth point. All derivative-like
quantities are measured in normalized coordinates (pixel distances divided
by the field maximum) so they compare directly against the analytic
bounds built from K1 = sup|g'| and K2 = sup|g''| on [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi
from scipy.spatial import ConvexHull

from ..dt import RemapFunction, exact_edt, remap_function
from ..validation import check_binary_mask

ALPHA_SLACK = 1.05


@dataclass(frozen=True)
class BoundEstimates:
    """Analytic constants and sampled ratios for one remap function."""

    k1: float
    k2: float
    k3: float
    alpha_hat: float
    alpha_bound: float
    beta_hat: float
    beta_bound: float
    eta: float = 0.0


def _bilinear(field: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    h, w = field.shape
    cx = np.clip(x, 0.0, w - 1.0)
    cy = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(cx).astype(np.int64)
    y0 = np.floor(cy).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = cx - x0
    fy = cy - y0
    top = field[y0, x0] * (1 - fx) + field[y0, x1] * fx
    bot = field[y1, x0] * (1 - fx) + field[y1, x1] * fx
    return top * (1 - fy) + bot * fy


class MatchingLoss:
    """Continuous interpolated loss l(u) = (g(d(u)) - g(d(y)))^2."""

    def __init__(self, contour, g: RemapFunction | str, y: tuple[float, float]):
        mask = check_binary_mask(contour)
        self.g = remap_function(g) if isinstance(g, str) else g
        dist = exact_edt(mask)
        self.scale = float(dist.max())
        self.norm_dist = dist / self.scale
        self.y = (float(y[0]), float(y[1]))
        self.g_at_y = float(self.g(self._d(self.y[1], self.y[0])))

    def _d(self, x, y):
        return _bilinear(self.norm_dist, np.asarray(x, float), np.asarray(y, float))

    def __call__(self, x, y):
        """Loss at pixel coordinates (x, y); broadcasts over arrays."""
        return (self.g(self._d(x, y)) - self.g_at_y) ** 2

    def regularized(self, x, y, eta: float):
        """Loss plus eta * squared normalized distance to the optimum."""
        dx = (np.asarray(x, float) - self.y[1]) / self.scale
        dy = (np.asarray(y, float) - self.y[0]) / self.scale
        return self(x, y) + eta * (dx * dx + dy * dy)


def estimate_curvature_max(contour, scale: float) -> float:
    """Max boundary curvature in normalized units, from the convex hull.

    Discrete turning angle divided by the mean adjacent edge length; the
    theory assumes a smooth convex boundary, so the hull is the natural
    polygonal stand-in.
    """
    mask = check_binary_mask(contour)
    ys, xs = np.nonzero(mask)
    pts = np.stack([xs, ys], axis=1).astype(np.float64)
    hull = ConvexHull(pts)
    poly = pts[hull.vertices]
    n = poly.shape[0]
    worst = 0.0
    for i in range(n):
        prev_pt = poly[(i - 1) % n]
        here = poly[i]
        next_pt = poly[(i + 1) % n]
        a = here - prev_pt
        b = next_pt - here
        la = np.linalg.norm(a)
        lb = np.linalg.norm(b)
        if la < 1e-9 or lb < 1e-9:
            continue
        cosang = np.clip(np.dot(a, b) / (la * lb), -1.0, 1.0)
        turn = np.arccos(cosang)
        kappa = turn / (0.5 * (la + lb))
        worst = max(worst, kappa)
    return float(worst * scale)


def _interior_points(contour: np.ndarray, rng: np.random.Generator, count: int):
    filled = ndi.binary_fill_holes(contour.astype(bool))
    ys, xs = np.nonzero(filled)
    idx = rng.integers(0, ys.size, size=count)
    jitter = rng.uniform(-0.45, 0.45, size=(count, 2))
    px = xs[idx] + jitter[:, 0]
    py = ys[idx] + jitter[:, 1]
    return px, py


def estimate_bounds(
    g: RemapFunction | str,
    contour,
    y: tuple[float, float],
    samples: int = 10_000,
    seed: int = 0,
    eta: float = 0.0,
) -> BoundEstimates:
    """Sample Lipschitz and smoothness ratios of the matching loss.

    ``alpha_hat`` is the largest |l(u) - l(v)| / ||u - v|| over random
    interior pairs, in normalized units; it must stay below 4 * K1 plus a
    5% discretization slack, and an ``AssertionError`` flags a violation.
    ``beta_hat`` is the analogous ratio for central-difference gradients,
    reported against 2*alpha*K1 + 4*K2 + 4*K1*K3.
    """
    loss = MatchingLoss(contour, g, y)
    gfun = loss.g
    rng = np.random.default_rng(seed)
    ux, uy = _interior_points(check_binary_mask(contour), rng, samples)
    vx, vy = _interior_points(check_binary_mask(contour), rng, samples)

    lu = loss(ux, uy)
    lv = loss(vx, vy)
    dist = np.hypot(ux - vx, uy - vy) / loss.scale
    keep = dist > 1e-6
    alpha_hat = float(np.max(np.abs(lu[keep] - lv[keep]) / dist[keep]))

    h = 0.25  # pixels; FD stencils stay within one bilinear cell at centres
    def grad(px, py):
        gx = (loss(px + h, py) - loss(px - h, py)) / (2 * h)
        gy = (loss(px, py + h) - loss(px, py - h)) / (2 * h)
        return gx * loss.scale, gy * loss.scale

    gux, guy = grad(ux, uy)
    gvx, gvy = grad(vx, vy)
    gdiff = np.hypot(gux - gvx, guy - gvy)
    beta_hat = float(np.max(gdiff[keep] / dist[keep]))

    k1, k2 = gfun.k1, gfun.k2
    k3 = estimate_curvature_max(contour, loss.scale)
    alpha_bound = 4.0 * k1
    beta_bound = 2.0 * alpha_bound * k1 + 4.0 * k2 + 4.0 * k1 * k3
    assert alpha_hat <= alpha_bound * ALPHA_SLACK, (
        f"sampled Lipschitz ratio {alpha_hat:.4f} exceeds "
        f"{alpha_bound:.4f} * {ALPHA_SLACK}"
    )
    return BoundEstimates(
        k1=k1,
        k2=k2,
        k3=k3,
        alpha_hat=alpha_hat,
        alpha_bound=alpha_bound,
        beta_hat=beta_hat,
        beta_bound=beta_bound,
        eta=eta,
    )


def _min_eig_2x2(h11: float, h22: float, h12: float) -> float:
    tr = h11 + h22
    det = h11 * h22 - h12 * h12
    disc = max(tr * tr / 4.0 - det, 0.0)
    return tr / 2.0 - np.sqrt(disc)


def convexity_check(
    g: RemapFunction | str,
    contour,
    y: tuple[float, float],
    eta: float = 0.01,
    radius: float = 3.0,
    step: float = 0.25,
) -> float:
    """Smallest Hessian eigenvalue of the regularized loss near the optimum.

    Central-difference Hessians of l + eta * ||. - y||^2 are evaluated at
    bilinear cell centres within ``radius`` pixels of ``y``, in normalized
    coordinates. A positive return certifies local strict convexity.
    """
    loss = MatchingLoss(contour, g, y)
    s = loss.scale
    yy, yx = loss.y
    h = step

    min_eig = np.inf
    r = int(np.ceil(radius))
    for oy in range(-r, r + 1):
        for ox in range(-r, r + 1):
            px = np.floor(yx) + ox + 0.5
            py = np.floor(yy) + oy + 0.5
            if np.hypot(px - yx, py - yy) > radius:
                continue

            def f(ax, ay):
                return float(loss.regularized(ax, ay, eta))

            f0 = f(px, py)
            h11 = (f(px + h, py) - 2 * f0 + f(px - h, py)) / h**2
            h22 = (f(px, py + h) - 2 * f0 + f(px, py - h)) / h**2
            h12 = (
                f(px + h, py + h)
                - f(px + h, py - h)
                - f(px - h, py + h)
                + f(px - h, py - h)
            ) / (4 * h**2)
            # normalized coordinates: d/du_norm = s * d/du_pix
            eig = _min_eig_2x2(h11 * s * s, h22 * s * s, h12 * s * s)
            min_eig = min(min_eig, eig)
    return float(min_eig)
