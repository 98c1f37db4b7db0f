"""Exception types shared across the package."""


class LieGeoError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(LieGeoError, ValueError):
    """A basis builder was asked for an unsupported matrix size."""


class BasisMismatchError(LieGeoError, ValueError):
    """Two objects living on different StructuredBasis instances were combined."""


class UnsupportedSplitError(LieGeoError, ValueError):
    """A subalgebra projection was requested on a basis without a split."""


class MetricConstructionError(LieGeoError, ValueError):
    """Metric parameters violate positivity/symmetry requirements."""


class IntegrationDivergedError(LieGeoError, RuntimeError):
    """The geodesic integrator produced a non-finite state.

    Attributes:
        last_valid_time: last grid time with a finite state.
    """

    def __init__(self, message, last_valid_time):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class CriterionInapplicableError(LieGeoError, RuntimeError):
    """A conjugate-point criterion's hypotheses are violated for this input."""


class ConfigError(LieGeoError, ValueError):
    """Run configuration could not be parsed or validated."""
