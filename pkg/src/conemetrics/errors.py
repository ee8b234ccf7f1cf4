"""Exception types shared across the library."""


class ConeGeometryError(Exception):
    """Base class for all conemetrics errors."""


class DimensionMismatchError(ConeGeometryError):
    """A vector does not match the ambient dimension of its cone."""


class NotInteriorError(ConeGeometryError):
    """A point required to be strictly inside the cone is not."""


class DifferentPartsError(ConeGeometryError):
    """Points at infinite Thompson distance; the operation is undefined."""


class NonSmoothPointError(ConeGeometryError):
    """Tied extreme coordinates: the interpolation map is not differentiable here."""


class BoundarySearchError(ConeGeometryError):
    """A bracketing search for the cone boundary did not converge."""


class SamplingBudgetError(ConeGeometryError):
    """Rejection sampling exhausted its retry budget."""
