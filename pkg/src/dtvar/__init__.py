"""Distance-transform variance augmentation over pre-semantic contours.

Core surface:

- :mod:`dtvar.grids` stencil operators on (H, W) arrays
- :mod:`dtvar.dt` distance transforms, remap family, random-walk encoding
- :mod:`dtvar.contours` pseudo-labels and edge post-processing
- :mod:`dtvar.losses` loss functions with analytic gradients
- :mod:`dtvar.reproject` pinhole warping and bilinear sampling
- :mod:`dtvar.estimators` sklearn-style transformer wrappers
- :mod:`dtvar.verify` theorem-verification experiments
- :mod:`dtvar.cli` command-line front end
"""

from .dt import (
    RandomWalkPath,
    RemapFunction,
    brute_force_dt,
    chamfer_d8,
    eikonal_residual,
    exact_edt,
    make_rw_path,
    remap,
    remap_function,
    rw_encode,
)
from .grids import dilate3x3, forward_diff, laplacian
from .losses import LossWeights
from .reproject import Intrinsics, RigidPose

__version__ = "0.1.0"

__all__ = [
    "RandomWalkPath",
    "RemapFunction",
    "brute_force_dt",
    "chamfer_d8",
    "eikonal_residual",
    "exact_edt",
    "make_rw_path",
    "remap",
    "remap_function",
    "rw_encode",
    "dilate3x3",
    "forward_diff",
    "laplacian",
    "LossWeights",
    "Intrinsics",
    "RigidPose",
    "__version__",
]
