"""Pinhole back-projection, rigid warping and bilinear resampling.

The warp follows the usual structure-from-motion chain: lift each pixel to
a 3-d point with the depth map and inverse intrinsics, move it with a
rigid pose, project it back and sample the target image at the landing
coordinates. A validity mask tracks pixels that land in-bounds with
positive transformed depth; loss evaluation masks the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_image, check_positive_depth


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole parameters in pixel units."""

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )


@dataclass(frozen=True)
class RigidPose:
    """6-DoF pose: XYZ Euler angles (radians) and a translation.

    The rotation matrix is R = Rz @ Ry @ Rx; zero angles give the exact
    identity.
    """

    rotation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def rotation_matrix(self) -> np.ndarray:
        rx, ry, rz = self.rotation
        cx_, sx = np.cos(rx), np.sin(rx)
        cy_, sy = np.cos(ry), np.sin(ry)
        cz, sz = np.cos(rz), np.sin(rz)
        r_x = np.array([[1, 0, 0], [0, cx_, -sx], [0, sx, cx_]])
        r_y = np.array([[cy_, 0, sy], [0, 1, 0], [-sy, 0, cy_]])
        r_z = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
        return r_z @ r_y @ r_x

    def is_identity(self) -> bool:
        return self.rotation == (0.0, 0.0, 0.0) and self.translation == (
            0.0,
            0.0,
            0.0,
        )


def backproject(depth, intrinsics: Intrinsics) -> np.ndarray:
    """Per-pixel 3-d points depth * K^-1 (u, v, 1), shape (H, W, 3)."""
    d = check_positive_depth(depth)
    h, w = d.shape
    u = np.arange(w, dtype=np.float64)[None, :]
    v = np.arange(h, dtype=np.float64)[:, None]
    x = d * ((u - intrinsics.cx) / intrinsics.fx)
    y = d * ((v - intrinsics.cy) / intrinsics.fy)
    return np.stack([x, y, d], axis=2)


def warp_coords(
    depth, pose: RigidPose, intrinsics: Intrinsics
) -> tuple[np.ndarray, np.ndarray]:
    """Landing pixel coordinates of each source pixel under the pose.

    Returns
    -------
    coords : (H, W, 2) float64
        (x, y) target coordinates per pixel.
    valid : (H, W) uint8
        1 where the projection lands in-bounds with positive depth.
    """
    d = check_positive_depth(depth)
    h, w = d.shape
    if pose.is_identity():
        jj, ii = np.meshgrid(
            np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64)
        )
        coords = np.stack([jj, ii], axis=2)
        return coords, np.ones((h, w), dtype=np.uint8)

    pts = backproject(d, intrinsics).reshape(-1, 3)
    rot = pose.rotation_matrix()
    moved = pts @ rot.T + np.asarray(pose.translation, dtype=np.float64)
    z = moved[:, 2]
    safe_z = np.where(z > 0, z, 1.0)
    x = intrinsics.fx * (moved[:, 0] / safe_z) + intrinsics.cx
    y = intrinsics.fy * (moved[:, 1] / safe_z) + intrinsics.cy
    coords = np.stack([x, y], axis=1).reshape(h, w, 2)
    valid = (
        (z > 0)
        & (x >= 0.0)
        & (x <= w - 1.0)
        & (y >= 0.0)
        & (y <= h - 1.0)
    ).reshape(h, w)
    return coords, valid.astype(np.uint8)


def bilinear_sample(src, coords) -> tuple[np.ndarray, np.ndarray]:
    """4-tap bilinear interpolation at float coordinates.

    Out-of-bounds taps clamp to the border and are reported invalid in the
    accompanying mask. Exactly-integer coordinates copy source pixels
    bit-for-bit.
    """
    img = check_image(src)
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim != 3 or pts.shape[2] != 2:
        raise ValueError(f"coords must be (H, W, 2), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("coords contain non-finite values")
    h, w, _ = img.shape
    x = pts[:, :, 0]
    y = pts[:, :, 1]
    valid = (x >= 0.0) & (x <= w - 1.0) & (y >= 0.0) & (y <= h - 1.0)

    cx = np.clip(x, 0.0, w - 1.0)
    cy = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(cx).astype(np.int64)
    y0 = np.floor(cy).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (cx - x0)[:, :, None]
    fy = (cy - y0)[:, :, None]

    v00 = img[y0, x0]
    v01 = img[y0, x1]
    v10 = img[y1, x0]
    v11 = img[y1, x1]
    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    out = top * (1.0 - fy) + bot * fy
    return out, valid.astype(np.uint8)


def reconstruct(
    target_aug, depth, pose: RigidPose, intrinsics: Intrinsics
) -> tuple[np.ndarray, np.ndarray]:
    """Warp the augmented target image into the source frame.

    Returns the resampled image and the joint validity mask (projection
    in-bounds and sample in-bounds).
    """
    img = check_image(target_aug)
    coords, valid_warp = warp_coords(depth, pose, intrinsics)
    if img.shape[:2] != coords.shape[:2]:
        raise ValueError(
            f"image {img.shape[:2]} and depth {coords.shape[:2]} shapes differ"
        )
    sampled, valid_sample = bilinear_sample(img, coords)
    return sampled, (valid_warp & valid_sample).astype(np.uint8)
