"""Exception types raised by the estimation pipeline."""


class DoaError(Exception):
    """Base class for all package errors."""


class DomainError(DoaError, ValueError):
    """An angle or argument lies outside the domain of a formula."""


class ConvergenceError(DoaError):
    """An iterative routine stopped at ``max_iter`` without meeting its tolerance.

    The last iterate is attached so that callers may still use it.
    """

    def __init__(self, message, result=None, iterations=None):
        super().__init__(message)
        self.result = result
        self.iterations = iterations


class IndefiniteMatrixError(DoaError, ValueError):
    """A matrix expected to be positive semidefinite has a significant negative eigenvalue."""


class DegenerateSpectrumError(DoaError):
    """The covariance carries no usable signal subspace (e.g. ``R = sigma^2 I``)."""


class EstimationError(DoaError):
    """An estimator stage failed. ``stage`` names the failing step."""

    def __init__(self, stage, message):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
