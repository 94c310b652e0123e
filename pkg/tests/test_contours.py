import numpy as np
import pytest
import scipy.ndimage as ndi
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import blurred_square_edge, square_ring
from dtvar.contours import (
    edge_binary,
    hysteresis,
    nms_gradient,
    normal_gap,
    normals_from_depth,
    norm_depth_grad,
    postprocess,
    pseudo_labels,
    refine,
    zero_crossings,
)
from dtvar.errors import (
    BadThresholds,
    DimensionMismatch,
    EmptyResult,
    NonPositiveDepth,
    NotUnitNormals,
)
from dtvar.grids import dilate3x3, laplacian
from dtvar.reproject import Intrinsics

EIGHT = np.ones((3, 3), dtype=bool)


# -- zero crossings -------------------------------------------------------------


def test_zero_crossings_constant():
    assert zero_crossings(np.full((4, 4), 2.0)).sum() == 0


def test_zero_crossings_sign_flip_x():
    lap = np.array([[1.0, -1.0]])
    out = zero_crossings(lap)
    assert out[0, 0] == 1 and out[0, 1] == 0


def test_zero_crossings_exact_zero_is_not_a_crossing():
    lap = np.array([[0.0, -1.0], [0.0, 1.0]])
    # products with a zero factor are 0, not < 0
    assert zero_crossings(lap)[0, 0] == 0
    assert zero_crossings(lap)[1, 0] == 0


# -- gradients -------------------------------------------------------------------


def test_norm_depth_grad_constant():
    assert np.array_equal(norm_depth_grad(np.full((3, 3), 4.0)), np.zeros((3, 3)))


def test_norm_depth_grad_hand_value():
    d = np.array([[1.0, 2.0]])
    out = norm_depth_grad(d)
    assert out[0, 0] == pytest.approx(0.5)  # (2-1)/max(2,1)


def test_norm_depth_grad_scale_invariance():
    rng = np.random.default_rng(3)
    d = rng.uniform(1.0, 5.0, (6, 7))
    assert np.allclose(norm_depth_grad(d), norm_depth_grad(10.0 * d), atol=1e-12)


def test_norm_depth_grad_range_and_errors():
    rng = np.random.default_rng(4)
    d = rng.uniform(0.1, 100.0, (8, 8))
    out = norm_depth_grad(d)
    assert out.min() >= 0 and out.max() <= 2.0
    with pytest.raises(NonPositiveDepth):
        norm_depth_grad(np.array([[1.0, 0.0]]))


def _uniform_normals(shape, vec):
    v = np.asarray(vec, dtype=np.float64)
    v = v / np.linalg.norm(v)
    return np.broadcast_to(v, shape + (3,)).copy()


def test_normal_gap_uniform_field():
    n = _uniform_normals((4, 5), (0.3, -0.5, 0.8))
    assert np.allclose(normal_gap(n), 0.0, atol=1e-12)


def test_normal_gap_orthogonal_and_antipodal():
    n = _uniform_normals((1, 3), (0.0, 0.0, 1.0))
    n[0, 1] = (1.0, 0.0, 0.0)  # orthogonal to its neighbours
    out = normal_gap(n)
    assert out[0, 0] == pytest.approx(1.0)  # 1 - |<z, x>|
    m = _uniform_normals((1, 2), (0.0, 0.0, 1.0))
    m[0, 1] = (0.0, 0.0, -1.0)
    assert normal_gap(m)[0, 0] == pytest.approx(0.0)  # |<n, -n>| = 1


def test_normal_gap_requires_unit_norm():
    bad = np.full((2, 2, 3), 0.9)
    with pytest.raises(NotUnitNormals):
        normal_gap(bad)


# -- pseudo labels ----------------------------------------------------------------


def step_depth(size=16, at=8, low=2.0, high=4.0):
    d = np.full((size, size), low)
    d[:, at:] = high
    return d


def test_pseudo_labels_sum_to_one_on_step():
    d = step_depth()
    n = normals_from_depth(d, Intrinsics(16.0, 16.0, 7.5, 7.5))
    labels = pseudo_labels(d, n)
    assert labels.w_d.sum() == pytest.approx(1.0, abs=1e-9)
    assert not labels.depth_empty
    # weight concentrates on the dilated crossing band around the step
    band = dilate3x3(zero_crossings(laplacian(d)))
    assert labels.w_d[band == 0].sum() == 0.0


def test_pseudo_labels_constant_scene_flags_empty():
    d = np.full((8, 8), 3.0)
    n = _uniform_normals((8, 8), (0.0, 0.0, -1.0))
    labels = pseudo_labels(d, n)
    assert labels.depth_empty and labels.normal_empty
    assert labels.w_d.sum() == 0.0 and labels.w_n.sum() == 0.0


def test_pseudo_labels_depth_scale_invariant():
    d = step_depth()
    n = normals_from_depth(d, Intrinsics(16.0, 16.0, 7.5, 7.5))
    a = pseudo_labels(d, n).w_d
    b = pseudo_labels(10.0 * d, n).w_d
    assert np.allclose(a, b, atol=1e-12)


# -- normals from depth -------------------------------------------------------------


def test_normals_fronto_parallel_plane():
    d = np.full((6, 6), 2.5)
    n = normals_from_depth(d, Intrinsics(10.0, 10.0, 2.5, 2.5))
    assert np.allclose(n, [0.0, 0.0, -1.0], atol=1e-12)


def test_normals_unit_norm_everywhere():
    rng = np.random.default_rng(5)
    d = rng.uniform(2.0, 3.0, (12, 12))
    n = normals_from_depth(d, Intrinsics(24.0, 24.0, 5.5, 5.5))
    assert np.abs(np.linalg.norm(n, axis=2) - 1.0).max() < 1e-12


def test_normals_recover_slanted_plane():
    # depth induced by the 3-d plane n . X = c has points exactly on the
    # plane, so tangent cross products recover the plane normal
    intr = Intrinsics(fx=32.0, fy=32.0, cx=7.5, cy=7.5)
    plane_n = np.array([0.3, -0.2, -0.9304772413])
    plane_n /= np.linalg.norm(plane_n)
    c = -2.0  # keeps depth positive with n_z < 0
    jj, ii = np.meshgrid(np.arange(16.0), np.arange(16.0))
    rays = np.stack(
        [(jj - intr.cx) / intr.fx, (ii - intr.cy) / intr.fy, np.ones((16, 16))], axis=2
    )
    depth = c / (rays @ plane_n)
    assert depth.min() > 0
    normals = normals_from_depth(depth, intr)
    assert np.abs(normals[:-1, :-1] - plane_n).max() < 1e-6


# -- hysteresis ----------------------------------------------------------------------


def test_hysteresis_all_strong():
    e = np.full((4, 4), 150.0)
    assert np.array_equal(hysteresis(e, 80, 100), np.ones((4, 4), dtype=np.uint8))


def test_hysteresis_chain_kept_isolated_dropped():
    e = np.zeros((3, 7))
    e[1, 1:4] = [90.0, 90.0, 120.0]  # weak chain touching a strong pixel
    e[1, 5] = 90.0  # isolated weak pixel
    out = hysteresis(e, 80, 100)
    assert out[1, 1] == 1 and out[1, 2] == 1 and out[1, 3] == 1
    assert out[1, 5] == 0


def test_hysteresis_bad_thresholds():
    with pytest.raises(BadThresholds):
        hysteresis(np.zeros((3, 3)), 100, 80)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_hysteresis_flood_fill_oracle(seed):
    gen = np.random.default_rng(seed)
    e = gen.uniform(0, 255, (16, 16))
    out = hysteresis(e, 80, 100)
    weak = e >= 80
    assert np.all(weak[out == 1])  # output subset of the weak mask
    # flood-fill oracle: every kept pixel reaches a strong pixel
    labels, _ = ndi.label(weak, structure=EIGHT)
    for y, x in zip(*np.nonzero(out)):
        component = labels == labels[y, x]
        assert (e[component] >= 100).any()
    # and no kept-out weak pixel connected to strong exists
    strong_labels = set(labels[e >= 100].ravel()) - {0}
    for y, x in zip(*np.nonzero(weak & (out == 0))):
        assert labels[y, x] not in strong_labels


# -- non-maximum suppression -----------------------------------------------------------


def test_nms_triangular_ridge_single_crest():
    xs = np.arange(13.0)
    profile = 1.0 - np.abs(xs - 6.0) / 6.0
    e = np.tile(profile, (7, 1))
    out = nms_gradient(e)
    assert np.all(out[:, 6] == 1)  # crest survives
    assert out[:, :6].sum() == 0 and out[:, 7:].sum() == 0


def test_nms_constant_is_empty():
    assert nms_gradient(np.full((5, 5), 0.7)).sum() == 0


def test_nms_isolated_peak_kept():
    e = np.zeros((5, 5))
    e[2, 2] = 1.0
    out = nms_gradient(e)
    assert out[2, 2] == 1
    assert out.sum() == 1


def test_nms_no_2x2_blocks_on_smooth_ridge():
    e = blurred_square_edge(40, 10, 30, sigma=1.5)
    out = nms_gradient(e)
    blocks = out[:-1, :-1] & out[1:, :-1] & out[:-1, 1:] & out[1:, 1:]
    assert blocks.sum() == 0


# -- edge combination and refinement ----------------------------------------------------


def test_edge_binary_full_and_disjoint():
    full = np.ones((3, 3), dtype=np.uint8)
    assert np.array_equal(edge_binary(full, full), full)
    a = np.zeros((3, 3), dtype=np.uint8)
    a[0, 0] = 1
    b = np.zeros((3, 3), dtype=np.uint8)
    b[2, 2] = 1
    assert edge_binary(a, b).sum() == 0


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_edge_binary_product_oracle(seed):
    gen = np.random.default_rng(seed)
    a = (gen.random((9, 9)) < 0.5).astype(np.uint8)
    b = (gen.random((9, 9)) < 0.5).astype(np.uint8)
    assert np.array_equal(edge_binary(a, b), ((a * b) > 0).astype(np.uint8))


def test_edge_binary_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        edge_binary(np.zeros((3, 3), dtype=np.uint8), np.zeros((4, 3), dtype=np.uint8))


def test_refine_removes_small_components():
    m = np.zeros((20, 20), dtype=np.uint8)
    m[2, 2] = 1  # single pixel, below min_component
    m[10, 2:15] = 1  # long line, kept
    out = refine(m, min_component=5, gap_max=0)
    assert out[2, 2] == 0
    assert np.all(out[10, 2:15] == 1)


def test_refine_bridges_one_pixel_gap():
    m = np.zeros((9, 21), dtype=np.uint8)
    m[4, 2:9] = 1
    m[4, 10:19] = 1  # gap at column 9
    out = refine(m, min_component=3, gap_max=3)
    assert out[4, 9] == 1
    labels, count = ndi.label(out, structure=EIGHT)
    assert count == 1


def test_refine_closed_loop_unchanged():
    ring = square_ring(16, 4, 11)
    out = refine(ring, min_component=5, gap_max=3)
    assert np.array_equal(out, ring)


# -- postprocess --------------------------------------------------------------------------


def test_postprocess_clean_square_loop():
    e = blurred_square_edge()
    out = postprocess(e)
    labels, count = ndi.label(out, structure=EIGHT)
    assert count == 1  # one closed loop
    neighbours = ndi.convolve(out.astype(int), np.ones((3, 3), int), mode="constant") - out
    assert np.all(neighbours[out == 1] >= 2)  # no open endpoints
    blocks = out[:-1, :-1] & out[1:, :-1] & out[:-1, 1:] & out[1:, 1:]
    assert blocks.sum() == 0  # 1-pixel thin


def test_postprocess_no_contour_invention():
    e = blurred_square_edge()
    out = postprocess(e)
    band = dilate3x3((e >= 80.0 / 255.0).astype(np.uint8))
    assert np.all(band[out == 1] == 1)


def test_postprocess_empty_input_raises():
    with pytest.raises(EmptyResult):
        postprocess(np.zeros((16, 16)))


def test_postprocess_rejects_out_of_range():
    with pytest.raises(ValueError):
        postprocess(np.full((8, 8), 2.0))
