"""Desk-scale verification harness for the theoretical claims.

Submodules:

- ``shapes``: deterministic synthetic shape generation.
- ``theorem1``: level-set histograms and constrained variance
  maximization converging to the distance transform.
- ``theorem2``: translation recovery by gradient descent on uniform vs
  distance-filled shapes.
- ``bounds``: sampled Lipschitz/smoothness bounds and Hessian convexity
  checks for the remap family.
- ``constancy``: temporal variance of tracked points across shifted
  frames for texture, distance and random-walk channels.
"""

from .shapes import ShapeSpec, gen_shape, shift_mask
from .theorem1 import VarianceResult, level_set_histogram, maximize_variance
from .theorem2 import RecoveryRecord, translation_recovery
from .bounds import BoundEstimates, convexity_check, estimate_bounds
from .constancy import constancy_experiment

__all__ = [
    "ShapeSpec",
    "gen_shape",
    "shift_mask",
    "VarianceResult",
    "level_set_histogram",
    "maximize_variance",
    "RecoveryRecord",
    "translation_recovery",
    "BoundEstimates",
    "estimate_bounds",
    "convexity_check",
    "constancy_experiment",
]
