"""Exception hierarchy shared across the package."""


class LassorootError(Exception):
    """Base class for all errors raised by this package."""


class SeriesError(LassorootError, ValueError):
    """Invalid series input (too short, non-finite values, bad shape)."""


class RankDeficientError(LassorootError):
    """Regression design matrix is not of full column rank."""


class InsufficientSampleError(LassorootError, ValueError):
    """Not enough observations for the requested lag order / spec."""


class DegenerateWeightError(LassorootError):
    """An initial OLS estimate is (numerically) zero, so the corresponding
    adaptive penalty weight is infinite and the activation knot undefined."""


class LevelNeverActivatesError(LassorootError):
    """The lagged-level regressor never entered the (truncated) solution path."""


class EnrichmentUnavailableError(LassorootError):
    """A tau-breve statistic was requested without an enrichment provider."""


class BootstrapFailureError(LassorootError):
    """Too many bootstrap replicates failed to produce a statistic."""


class ConfigError(LassorootError, ValueError):
    """Invalid configuration object or file."""
