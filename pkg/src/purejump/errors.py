"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: config problems exit 2, numerical
failures exit 3, insufficient/unusable data exits 4.
"""


class PurejumpError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(PurejumpError):
    """Invalid configuration file or flag value (exit code 2)."""


class NumericalError(PurejumpError):
    """Base class for numerical failures (exit code 3)."""


class EmbeddingFailure(NumericalError):
    """Circulant embedding produced an eigenvalue below -tol_eig."""


class NegativeVariance(NumericalError):
    """An assembled population variance came out non-positive."""


class NoRoot(NumericalError):
    """Moment-matching root finder left a residual above tolerance.

    Carries the best point found so the caller can inspect it.
    """

    def __init__(self, message, best=None, diagnostics=None):
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics or {}


class NegativeSampleCov(NumericalError):
    """Sample count autocovariances are incompatible with the model."""


class DegenerateVariance(NumericalError):
    """A sample variance in a correlation window is exactly zero."""


class DataError(PurejumpError):
    """Base class for data problems (exit code 4)."""


class InsufficientData(DataError):
    """Series too short for the requested aggregation or test."""


class ZeroCounts(DataError):
    """A count series with zero mean cannot identify the parameters."""


class TooFewOrdinates(DataError):
    """Not enough periodogram ordinates for the log-periodogram fit."""


class DurationPoolExhausted(PurejumpError):
    """More exponential durations were needed than the configured cap."""


class InvalidDriftPair(PurejumpError):
    """Two-shock drifts must satisfy mu1 > 0, mu2 <= 0, mu1 + mu2 > 0."""
