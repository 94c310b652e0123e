import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtvar.errors import DimensionTooSmall
from dtvar.grids import dilate3x3, forward_diff, laplacian


def test_forward_diff_constant_is_zero():
    g = np.full((5, 7), 3.25)
    assert np.array_equal(forward_diff(g, "x"), np.zeros((5, 7)))
    assert np.array_equal(forward_diff(g, "y"), np.zeros((5, 7)))


def test_forward_diff_ramp_x():
    g = np.tile(np.arange(6.0), (4, 1))
    out = forward_diff(g, "x")
    assert np.array_equal(out[:, :-1], np.ones((4, 5)))
    assert np.array_equal(out[:, -1], np.zeros(4))


def test_forward_diff_impulse():
    g = np.zeros((3, 3))
    g[1, 1] = 1.0
    out = forward_diff(g, "x")
    assert out[1, 0] == 1.0  # left of centre sees the rise
    assert out[1, 1] == -1.0  # centre sees the fall
    assert out.sum() == 0.0


def test_forward_diff_bad_axis():
    with pytest.raises(ValueError):
        forward_diff(np.zeros((3, 3)), "z")


def test_laplacian_constant_and_linear():
    assert np.array_equal(laplacian(np.full((4, 4), 2.0)), np.zeros((4, 4)))
    ramp = np.add.outer(np.arange(5.0), 2.0 * np.arange(5.0))
    assert np.array_equal(laplacian(ramp), np.zeros((5, 5)))


def test_laplacian_impulse():
    g = np.zeros((5, 5))
    g[2, 2] = 1.0
    out = laplacian(g)
    assert out[2, 2] == -4.0
    for p in [(1, 2), (3, 2), (2, 1), (2, 3)]:
        assert out[p] == 1.0
    assert out.sum() == 0.0


def test_laplacian_needs_3x3():
    with pytest.raises(DimensionTooSmall):
        laplacian(np.zeros((2, 5)))
    with pytest.raises(DimensionTooSmall):
        laplacian(np.zeros((5, 2)))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_laplacian_is_composed_forward_diffs(seed):
    g = np.random.default_rng(seed).normal(size=(8, 9))
    lap = laplacian(g)
    d2x = forward_diff(forward_diff(g, "x"), "x")
    d2y = forward_diff(forward_diff(g, "y"), "y")
    # second forward differences are shifted one pixel towards the origin
    expected = d2x[1:-1, :-2] + d2y[:-2, 1:-1]
    assert np.allclose(lap[1:-1, 1:-1], expected, atol=0)


def test_dilate_empty_and_full():
    empty = np.zeros((6, 6), dtype=np.uint8)
    full = np.ones((6, 6), dtype=np.uint8)
    assert np.array_equal(dilate3x3(empty), empty)
    assert np.array_equal(dilate3x3(full), full)


def test_dilate_single_pixel():
    m = np.zeros((5, 5), dtype=np.uint8)
    m[2, 2] = 1
    out = dilate3x3(m)
    expected = np.zeros((5, 5), dtype=np.uint8)
    expected[1:4, 1:4] = 1
    assert np.array_equal(out, expected)


def test_dilate_border_uses_inbounds_window():
    m = np.zeros((4, 4), dtype=np.uint8)
    m[0, 0] = 1
    out = dilate3x3(m)
    expected = np.zeros((4, 4), dtype=np.uint8)
    expected[:2, :2] = 1
    assert np.array_equal(out, expected)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_dilate_extensive_and_monotone(seed):
    gen = np.random.default_rng(seed)
    a = (gen.random((12, 12)) < 0.2).astype(np.uint8)
    b = (a | (gen.random((12, 12)) < 0.1)).astype(np.uint8)
    da, db = dilate3x3(a), dilate3x3(b)
    assert np.all(da >= a)  # extensive
    assert np.all(db >= da)  # monotone since b >= a
