"""Domain error types raised by the library.

Every error carries a short machine-readable ``name`` used by the CLI to
report domain failures (exit code 1) distinctly from usage errors (exit
code 2).
"""


class DtvarError(Exception):
    """Base class for all domain errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class DimensionTooSmall(DtvarError):
    """Grid too small for the requested stencil."""


class DimensionMismatch(DtvarError):
    """Operands do not share the same shape."""


class EmptyContour(DtvarError):
    """Distance transform requested for a contour with no set pixel."""


class BadDimension(DtvarError):
    """Random-walk dimension outside the supported range."""


class PathTooShort(DtvarError):
    """Random-walk path shorter than the maximum distance value."""


class NonPositiveDepth(DtvarError):
    """Depth map contains zero or negative entries."""


class NotUnitNormals(DtvarError):
    """Normal field entries deviate from unit Euclidean norm."""


class BadThresholds(DtvarError):
    """Hysteresis thresholds are not ordered low < high."""


class EmptyResult(DtvarError):
    """Post-processing removed every contour pixel."""


class DegenerateShape(DtvarError):
    """Generated shape has an empty interior."""
