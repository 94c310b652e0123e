"""Scikit-learn compatible wrappers around the grid transforms.

These estimators make the transform-shaped operations compose with
sklearn pipelines and parameter search: they implement ``fit`` /
``transform`` / ``get_params`` over (H, W) grids. All are stateless
except ``RandomWalkEncoder``, whose ``fit`` draws the walk path once so
every frame transformed afterwards shares it (the encoding is only
comparable across frames when the path is shared).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import contours
from .dt import (
    brute_force_dt,
    chamfer_d8,
    exact_edt,
    make_rw_path,
    remap,
    remap_function,
    rw_encode,
)
from .validation import check_binary_mask, check_image, check_scalar_grid

_DT_METRICS = ("d8", "euclid", "brute", "brute-euclid")


class DistanceTransformer(BaseEstimator, TransformerMixin):
    """Distance transform of a binary contour mask.

    Parameters
    ----------
    metric : {"d8", "euclid", "brute", "brute-euclid"}
        Two-pass chessboard, exact Euclidean, or the brute-force oracle
        in either metric.
    """

    def __init__(self, metric: str = "d8"):
        self.metric = metric

    def fit(self, X=None, y=None):
        if self.metric not in _DT_METRICS:
            raise ValueError(f"metric must be one of {_DT_METRICS}")
        self.n_features_in_ = 0
        return self

    def transform(self, X):
        check_is_fitted(self)
        mask = check_binary_mask(X)
        if self.metric == "d8":
            return chamfer_d8(mask)
        if self.metric == "euclid":
            return exact_edt(mask)
        if self.metric == "brute":
            return brute_force_dt(mask, "chessboard")
        return brute_force_dt(mask, "euclidean")


class DistanceRemapper(BaseEstimator, TransformerMixin):
    """Apply one of the bounded remap functions to a distance field."""

    def __init__(self, g: str = "identity"):
        self.g = g

    def fit(self, X=None, y=None):
        remap_function(self.g)  # validates the tag
        self.n_features_in_ = 0
        return self

    def transform(self, X):
        check_is_fitted(self)
        return remap(check_scalar_grid(X), self.g)


class RandomWalkEncoder(BaseEstimator, TransformerMixin):
    """Encode integer distance fields on a shared random-walk path.

    ``fit`` draws the path; ``steps=None`` sizes it from the fitted
    grid's dimensions (H + W bounds any chessboard distance).
    """

    def __init__(
        self,
        dims: int = 3,
        steps: int | None = None,
        eps: float = 0.01,
        partitions: int = 1000,
        seed: int = 0,
    ):
        self.dims = dims
        self.steps = steps
        self.eps = eps
        self.partitions = partitions
        self.seed = seed

    def fit(self, X, y=None):
        grid = check_scalar_grid(X)
        steps = self.steps if self.steps is not None else sum(grid.shape)
        self.path_ = make_rw_path(self.dims, steps, self.eps, self.partitions, self.seed)
        return self

    def transform(self, X):
        check_is_fitted(self, "path_")
        return rw_encode(check_scalar_grid(X), self.path_)

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y).transform(X)


class ContourPostprocessor(BaseEstimator, TransformerMixin):
    """Thin binary contours from continuous edge maps in [0, 1]."""

    def __init__(
        self,
        low: float = 80.0,
        high: float = 100.0,
        min_component: int = 20,
        gap_max: int = 3,
    ):
        self.low = low
        self.high = high
        self.min_component = min_component
        self.gap_max = gap_max

    def fit(self, X=None, y=None):
        if not self.low < self.high:
            raise ValueError("low must be < high")
        self.n_features_in_ = 0
        return self

    def transform(self, X):
        check_is_fitted(self)
        return contours.postprocess(
            check_scalar_grid(X),
            low=self.low,
            high=self.high,
            min_component=self.min_component,
            gap_max=self.gap_max,
        )


class VarianceAugmenter(BaseEstimator, TransformerMixin):
    """Concatenate an RGB image with encoded distance channels.

    ``transform`` expects a tuple ``(image, contour_mask)`` and returns
    the (H, W, 3 + dims) augmented image; the walk path is drawn at
    ``fit`` time and shared across frames.
    """

    def __init__(
        self,
        dims: int = 3,
        eps: float = 0.01,
        partitions: int = 1000,
        seed: int = 0,
    ):
        self.dims = dims
        self.eps = eps
        self.partitions = partitions
        self.seed = seed

    def fit(self, X, y=None):
        image, _ = X
        h, w = np.asarray(image).shape[:2]
        self.path_ = make_rw_path(self.dims, h + w, self.eps, self.partitions, self.seed)
        return self

    def transform(self, X):
        check_is_fitted(self, "path_")
        image, mask = X
        img = check_image(image)
        encoded = rw_encode(chamfer_d8(check_binary_mask(mask)), self.path_)
        return np.concatenate([img, encoded], axis=2)

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y).transform(X)
