"""Time-series container, FD detrending and differencing utilities."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import SeriesError

__all__ = ["Detrend", "Series", "DetrendedSeries", "detrend_fd", "diff"]


class Detrend(str, Enum):
    """Deterministic-component specification."""

    NONE = "none"
    CONSTANT = "constant"
    TREND = "trend"

    @classmethod
    def from_string(cls, value) -> "Detrend":
        if isinstance(value, Detrend):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise SeriesError(
                f"unknown detrend kind {value!r}; expected one of "
                f"{[m.value for m in cls]}"
            ) from None


def _as_values(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise SeriesError(f"series values must be 1-d, got shape {arr.shape}")
    if arr.size < 2:
        raise SeriesError(f"series needs at least 2 observations, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise SeriesError("series contains non-finite values")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Series:
    """Univariate series y_0, ..., y_T (length T + 1), values immutable."""

    values: np.ndarray
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.values))

    def __len__(self) -> int:
        return self.values.size

    @property
    def T(self) -> int:
        """Number of increments (length minus one)."""
        return self.values.size - 1


@dataclass(frozen=True)
class DetrendedSeries:
    """Series adjusted for deterministic components by first differences."""

    values: np.ndarray
    kind: Detrend
    theta_hat: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.values))
        theta = np.asarray(self.theta_hat, dtype=float).copy()
        theta.flags.writeable = False
        object.__setattr__(self, "theta_hat", theta)

    def __len__(self) -> int:
        return self.values.size

    @property
    def T(self) -> int:
        return self.values.size - 1


def detrend_fd(y: Series | np.ndarray, kind: Detrend | str) -> DetrendedSeries:
    """Adjust for a constant or linear trend using first differences.

    The slope is estimated by the mean of first differences,
    (y_T - y_0) / T, and the intercept by the initial value, so that the
    adjusted series is exactly zero at t = 0 (and also at t = T under a
    trend adjustment).
    """
    kind = Detrend.from_string(kind)
    values = y.values if isinstance(y, (Series, DetrendedSeries)) else _as_values(y)
    if kind is Detrend.NONE:
        return DetrendedSeries(values, kind, np.empty(0))
    if kind is Detrend.CONSTANT:
        mu = values[0]
        return DetrendedSeries(values - mu, kind, np.array([mu]))
    if values.size < 3:
        raise SeriesError("trend adjustment needs at least 3 observations")
    T = values.size - 1
    beta = (values[-1] - values[0]) / T
    mu = values[0]
    adjusted = values - mu - beta * np.arange(values.size)
    return DetrendedSeries(adjusted, kind, np.array([mu, beta]))


def diff(values: Series | np.ndarray) -> np.ndarray:
    """First differences y_t - y_{t-1}, t = 1..T (length T)."""
    arr = values.values if isinstance(values, (Series, DetrendedSeries)) else np.asarray(values, dtype=float)
    if arr.size < 2:
        raise SeriesError("need at least 2 observations to difference")
    return np.diff(arr)
