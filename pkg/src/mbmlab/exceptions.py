"""Exception hierarchy shared by every module of the package."""


class MbmLabError(Exception):
    """Base class for all package errors."""


class GridAlignmentError(MbmLabError, ValueError):
    """The time grid does not contain the origin as a node."""


class DomainError(MbmLabError, ValueError):
    """A parameter lies outside its admissible range."""


class SynthesisError(MbmLabError, RuntimeError):
    """Exact Gaussian synthesis failed (non positive definite covariance)."""


class SupportError(MbmLabError, ValueError):
    """An evaluation point or integration range exceeds the available samples."""


class StepError(MbmLabError, ValueError):
    """A finite-difference stencil in H leaves (0, 1)."""


class EstimationError(MbmLabError, ValueError):
    """Not enough scales or samples to run an estimator."""

    def __init__(self, message, n_scales=None):
        super().__init__(message)
        self.n_scales = n_scales


class ScaleError(MbmLabError, ValueError):
    """A box size is below the sampling resolution."""


class StatisticsError(MbmLabError, ValueError):
    """Too few Monte Carlo replicates for a stable second-order estimate."""


class ApplicabilityError(MbmLabError, ValueError):
    """The requested check does not apply to the given Hurst function."""


class ConfigError(MbmLabError, ValueError):
    """Invalid experiment configuration; ``key`` names the offending field."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
