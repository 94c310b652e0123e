"""Loss functions with analytic gradients and a finite-difference checker.

All losses are reported as means over pixels (and channels where present)
so values are resolution independent; multiply by the pixel count to
recover summed forms. Gradients are hand-derived; the
``finite_diff_check`` utility validates them against central differences
away from absolute-value kinks.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .contours import PseudoLabelPair
from .validation import (
    check_image,
    check_positive_depth,
    check_same_shape,
    check_scalar_grid,
    check_unit_normals,
)

SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2
BCE_CLAMP = 1e-6


@dataclass(frozen=True)
class LossWeights:
    """Loss mixing weights; defaults follow the reference configuration.

    ``alpha_edge`` is the sharpness of the exp(-alpha * E) edge gate in the
    smoothness loss and has no published value; 5.0 makes the gate
    effectively zero across confirmed edges.
    """

    lambda_d: float = 0.5
    lambda_n: float = 0.25
    lambda_e: float = 1.0
    lambda_c: float = 0.001
    lambda_photo: float = 1.0
    lambda_dist: float = 1.0
    lambda_s: float = 0.001
    lambda_ns: float = 0.01
    alpha_edge: float = 5.0
    ssim_weight: float = 0.85

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be nonnegative")


# -- 3x3 box pooling with replicate padding -----------------------------------


def _box3(x: np.ndarray) -> np.ndarray:
    """Mean over 3x3 windows, borders replicated."""
    xp = np.pad(x, ((1, 1), (1, 1), (0, 0)), mode="edge")
    out = np.zeros_like(x)
    for dy in range(3):
        for dx in range(3):
            out += xp[dy : dy + x.shape[0], dx : dx + x.shape[1]]
    return out / 9.0


def _box3_adjoint(y: np.ndarray) -> np.ndarray:
    """Exact adjoint of ``_box3`` (scatter then fold the replicate pad)."""
    h, w = y.shape[:2]
    zp = np.zeros((h + 2, w + 2) + y.shape[2:])
    t = y / 9.0
    for dy in range(3):
        for dx in range(3):
            zp[dy : dy + h, dx : dx + w] += t
    z = zp[1:-1, 1:-1].copy()
    z[0, :] += zp[0, 1:-1]
    z[-1, :] += zp[-1, 1:-1]
    z[:, 0] += zp[1:-1, 0]
    z[:, -1] += zp[1:-1, -1]
    z[0, 0] += zp[0, 0]
    z[0, -1] += zp[0, -1]
    z[-1, 0] += zp[-1, 0]
    z[-1, -1] += zp[-1, -1]
    return z


def _ssim_terms(a: np.ndarray, b: np.ndarray):
    mu_a = _box3(a)
    mu_b = _box3(b)
    e_a2 = _box3(a * a)
    e_b2 = _box3(b * b)
    e_ab = _box3(a * b)
    var_a = e_a2 - mu_a * mu_a
    var_b = e_b2 - mu_b * mu_b
    cov = e_ab - mu_a * mu_b
    n1 = 2.0 * mu_a * mu_b + SSIM_C1
    d1 = mu_a * mu_a + mu_b * mu_b + SSIM_C1
    n2 = 2.0 * cov + SSIM_C2
    d2 = var_a + var_b + SSIM_C2
    s = (n1 * n2) / (d1 * d2)
    return s, mu_a, mu_b, n1, d1, n2, d2


def ssim(a, b) -> np.ndarray:
    """Per-pixel SSIM with 3x3 mean pooling, averaged over channels.

    Values lie in [-1, 1]; identical inputs give exactly 1.
    """
    ia = check_image(a, "a")
    ib = check_image(b, "b")
    check_same_shape(ia, ib, "ssim inputs")
    s, *_ = _ssim_terms(ia, ib)
    return s.mean(axis=2)


def photometric(rec, target) -> float:
    """SSIM/L1 mixture between a reconstruction and its target.

    mean over pixels and channels of
    ``w * (1 - SSIM)/2 + (1 - w) * |rec - target|`` with w = 0.85.
    """
    a = check_image(rec, "rec")
    b = check_image(target, "target")
    check_same_shape(a, b, "photometric inputs")
    w = LossWeights().ssim_weight
    s, *_ = _ssim_terms(a, b)
    return float(np.mean(w * (1.0 - s) / 2.0 + (1.0 - w) * np.abs(a - b)))


def photometric_grad(rec, target) -> np.ndarray:
    """Gradient of ``photometric`` with respect to the reconstruction."""
    a = check_image(rec, "rec")
    b = check_image(target, "target")
    check_same_shape(a, b, "photometric inputs")
    w = LossWeights().ssim_weight
    n = a.size
    s, mu_a, mu_b, n1, d1, n2, d2 = _ssim_terms(a, b)

    upstream = np.full_like(a, -w / (2.0 * n))  # dL/dS per pixel-channel
    t_mu = s * (2.0 * mu_b / n1 - 2.0 * mu_a / d1 - 2.0 * mu_b / n2 + 2.0 * mu_a / d2)
    t_ea2 = -s / d2
    t_eab = 2.0 * s / n2

    grad = _box3_adjoint(upstream * t_mu)
    grad += 2.0 * a * _box3_adjoint(upstream * t_ea2)
    grad += b * _box3_adjoint(upstream * t_eab)
    grad += (1.0 - w) * np.sign(a - b) / n
    return grad


def dist_loss(rec_enc, enc) -> float:
    """Mean absolute difference over all pixels and channels."""
    a = np.asarray(rec_enc, dtype=np.float64)
    b = np.asarray(enc, dtype=np.float64)
    check_same_shape(a, b, "encodings")
    return float(np.mean(np.abs(a - b)))


def dist_loss_grad(rec_enc, enc) -> np.ndarray:
    a = np.asarray(rec_enc, dtype=np.float64)
    b = np.asarray(enc, dtype=np.float64)
    check_same_shape(a, b, "encodings")
    return np.sign(a - b) / a.size


# -- smoothness ----------------------------------------------------------------


def _norm_ratio(d: np.ndarray, axis: str) -> np.ndarray:
    """Signed forward difference normalized by the larger neighbour."""
    out = np.zeros_like(d)
    if axis == "x":
        out[:, :-1] = (d[:, 1:] - d[:, :-1]) / np.maximum(d[:, 1:], d[:, :-1])
    else:
        out[:-1, :] = (d[1:, :] - d[:-1, :]) / np.maximum(d[1:, :], d[:-1, :])
    return out


def smooth_s(depth, edge, alpha: float | None = None) -> tuple[float, float]:
    """Edge-gated smoothness pair.

    The first component charges depth variation away from edges, the
    second charges missing depth variation across edges:

    - s1 = mean(||grad D|| * exp(-alpha * E))
    - s2 = mean(log(1 + exp(-||grad D||)) * (1 - exp(-alpha * E)))
    """
    d = check_positive_depth(depth)
    e = check_scalar_grid(edge, "edge")
    check_same_shape(d, e, "depth and edge")
    if alpha is None:
        alpha = LossWeights().alpha_edge
    m = np.abs(_norm_ratio(d, "x")) + np.abs(_norm_ratio(d, "y"))
    gate = np.exp(-alpha * e)
    s1 = float(np.mean(m * gate))
    s2 = float(np.mean(np.log1p(np.exp(-m)) * (1.0 - gate)))
    return s1, s2


def smooth_s_grad(depth, edge, alpha: float | None = None) -> np.ndarray:
    """Gradient of s1 + s2 with respect to depth (sign(0) = 0 convention)."""
    d = check_positive_depth(depth)
    e = check_scalar_grid(edge, "edge")
    check_same_shape(d, e, "depth and edge")
    if alpha is None:
        alpha = LossWeights().alpha_edge
    rx = _norm_ratio(d, "x")
    ry = _norm_ratio(d, "y")
    m = np.abs(rx) + np.abs(ry)
    gate = np.exp(-alpha * e)
    # d(s1 + s2)/dm per pixel, already divided by the pixel count
    coef = (gate - (1.0 - gate) * np.exp(-m) / (1.0 + np.exp(-m))) / d.size

    grad = np.zeros_like(d)
    # x axis: pixels p = (:, :-1), neighbours q = (:, 1:)
    p = d[:, :-1]
    q = d[:, 1:]
    t = coef[:, :-1] * np.sign(rx[:, :-1])
    dq = np.where(q >= p, p / (q * q), 1.0 / p)
    dp = np.where(q >= p, -1.0 / q, -q / (p * p))
    grad[:, 1:] += t * dq
    grad[:, :-1] += t * dp
    # y axis
    p = d[:-1, :]
    q = d[1:, :]
    t = coef[:-1, :] * np.sign(ry[:-1, :])
    dq = np.where(q >= p, p / (q * q), 1.0 / p)
    dp = np.where(q >= p, -1.0 / q, -q / (p * p))
    grad[1:, :] += t * dq
    grad[:-1, :] += t * dp
    return grad


def _image_grad_mag(img: np.ndarray, axis: str) -> np.ndarray:
    """Channel-averaged absolute forward difference of an image."""
    if axis == "x":
        diff = np.zeros(img.shape[:2])
        diff[:, :-1] = np.abs(img[:, 1:, :] - img[:, :-1, :]).mean(axis=2)
    else:
        diff = np.zeros(img.shape[:2])
        diff[:-1, :] = np.abs(img[1:, :, :] - img[:-1, :, :]).mean(axis=2)
    return diff


def baseline_smooth(depth, image) -> float:
    """Image-gradient-gated smoothness used as the conventional baseline."""
    d = check_positive_depth(depth)
    img = check_image(image)
    check_same_shape(d, img[:, :, 0], "depth and image")
    ax = np.abs(_norm_ratio(d, "x"))
    ay = np.abs(_norm_ratio(d, "y"))
    wx = np.exp(-_image_grad_mag(img, "x"))
    wy = np.exp(-_image_grad_mag(img, "y"))
    return float(np.mean(ax * wx + ay * wy))


def normal_smooth(normals, image) -> float:
    """Image-gradient-gated smoothness of a unit normal field."""
    n = check_unit_normals(normals)
    img = check_image(image)
    check_same_shape(n[:, :, 0], img[:, :, 0], "normals and image")
    gx = np.zeros(n.shape[:2])
    gy = np.zeros(n.shape[:2])
    gx[:, :-1] = 1.0 - np.abs(np.sum(n[:, 1:, :] * n[:, :-1, :], axis=2))
    gy[:-1, :] = 1.0 - np.abs(np.sum(n[1:, :, :] * n[:-1, :, :], axis=2))
    wx = np.exp(-_image_grad_mag(img, "x"))
    wy = np.exp(-_image_grad_mag(img, "y"))
    return float(np.mean(gx * wx + gy * wy))


# -- edge supervision ----------------------------------------------------------


def edge_supervision(
    edge, labels: PseudoLabelPair, weights: LossWeights | None = None
) -> float:
    """Pseudo-label alignment plus contrastive and magnitude penalties.

    mean((ld*wd + ln*wn) * (1 - E)) + lc * BCE(E, [E >= 0.5])
    + le * mean(E^2), with E clamped away from {0, 1} inside the BCE.
    """
    e = check_scalar_grid(edge, "edge")
    w = weights or LossWeights()
    check_same_shape(e, labels.w_d, "edge and pseudo-labels")
    support = w.lambda_d * labels.w_d + w.lambda_n * labels.w_n
    y = (e >= 0.5).astype(np.float64)
    ec = np.clip(e, BCE_CLAMP, 1.0 - BCE_CLAMP)
    bce = -np.mean(y * np.log(ec) + (1.0 - y) * np.log(1.0 - ec))
    return float(
        np.mean(support * (1.0 - e)) + w.lambda_c * bce + w.lambda_e * np.mean(e * e)
    )


def edge_supervision_grad(
    edge, labels: PseudoLabelPair, weights: LossWeights | None = None
) -> np.ndarray:
    """Gradient with respect to the edge map (threshold held fixed)."""
    e = check_scalar_grid(edge, "edge")
    w = weights or LossWeights()
    support = w.lambda_d * labels.w_d + w.lambda_n * labels.w_n
    y = (e >= 0.5).astype(np.float64)
    ec = np.clip(e, BCE_CLAMP, 1.0 - BCE_CLAMP)
    inside = (e > BCE_CLAMP) & (e < 1.0 - BCE_CLAMP)
    dbce = np.where(inside, -y / ec + (1.0 - y) / (1.0 - ec), 0.0)
    return (-support + w.lambda_c * dbce + w.lambda_e * 2.0 * e) / e.size


def depth_total(
    dist: float,
    photo: float,
    smooth: float,
    normal_smoothness: float = 0.0,
    weights: LossWeights | None = None,
) -> float:
    """Weighted sum forming the depth supervision signal."""
    w = weights or LossWeights()
    for part in (dist, photo, smooth, normal_smoothness):
        if not np.isfinite(part):
            raise ValueError("loss parts must be finite")
    return (
        w.lambda_dist * dist
        + w.lambda_photo * photo
        + w.lambda_s * smooth
        + w.lambda_ns * normal_smoothness
    )


def finite_diff_check(fn, grad_fn, x, step: float = 1e-5) -> float:
    """Max deviation of an analytic gradient from central differences.

    The deviation is normalized by the largest gradient entry seen on
    either side, with an absolute floor of 1e-3 so that near-zero
    gradients are compared absolutely rather than by an ill-conditioned
    ratio. ``fn`` maps a grid to a scalar; ``grad_fn`` maps it to a
    same-shaped gradient.
    """
    x0 = np.asarray(x, dtype=np.float64)
    analytic = np.asarray(grad_fn(x0), dtype=np.float64)
    fd = np.zeros_like(x0)
    flat = x0.ravel()
    fd_flat = fd.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        up = fn(x0)
        flat[i] = orig - step
        down = fn(x0)
        flat[i] = orig
        fd_flat[i] = (up - down) / (2.0 * step)
    scale = max(float(np.abs(fd).max()), float(np.abs(analytic).max()), 1e-3)
    return float(np.abs(analytic - fd).max() / scale)
