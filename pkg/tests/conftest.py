import numpy as np
import pytest
import scipy.ndimage as ndi


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def square_ring(size: int, lo: int, hi: int) -> np.ndarray:
    """1-pixel axis-aligned square outline."""
    m = np.zeros((size, size), dtype=np.uint8)
    m[lo : hi + 1, lo] = 1
    m[lo : hi + 1, hi] = 1
    m[lo, lo : hi + 1] = 1
    m[hi, lo : hi + 1] = 1
    return m


def blurred_square_edge(size: int = 48, lo: int = 12, hi: int = 36, sigma: float = 1.0):
    """Continuous edge map in [0, 1] peaking on a square outline."""
    e = ndi.gaussian_filter(square_ring(size, lo, hi).astype(np.float64), sigma)
    return e / e.max()


def random_mask(rng, shape=(64, 64), density=0.05) -> np.ndarray:
    mask = (rng.random(shape) < density).astype(np.uint8)
    if mask.sum() == 0:
        mask[shape[0] // 2, shape[1] // 2] = 1
    return mask
