"""ADF(p) regressions, variance-profile estimation and (RS)MAIC lag selection."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InsufficientSampleError, RankDeficientError
from .series import DetrendedSeries, Series

__all__ = [
    "AdfFit",
    "VarianceProfile",
    "LagSelection",
    "fit_adf",
    "residuals_for_bootstrap",
    "variance_profile",
    "kernel_volatility",
    "select_lag",
]

DEFAULT_BANDWIDTH = 0.1


@functools.lru_cache(maxsize=8)
def _kernel_weights(n: int, bandwidth: float) -> np.ndarray:
    # the weight matrix depends only on (n, bandwidth); the bootstrap calls
    # the volatility estimator once per replicate with a fixed sample size
    idx = np.arange(n, dtype=float)
    z = (idx[:, None] - idx[None, :]) / (bandwidth * n)
    return np.exp(-0.5 * z * z)


def _values(yd) -> np.ndarray:
    if isinstance(yd, (DetrendedSeries, Series)):
        return yd.values
    return np.asarray(yd, dtype=float)


@dataclass(frozen=True)
class AdfFit:
    """OLS fit of Delta y_t = rho * y_{t-1} + sum_j delta_j * Delta y_{t-j} + e_t."""

    p: int
    rho_hat: float
    delta_hat: np.ndarray
    residuals: np.ndarray
    sigma2_hat: float
    effective_start: int
    include_level: bool = True


def _design(y: np.ndarray, p: int, start: int | None = None, include_level: bool = True):
    """Response Delta y_t and regressor matrix over t = start..T.

    `y` has index 0..T; the default start is p + 1 (first t with p lagged
    differences available).
    """
    T = y.size - 1
    if start is None:
        start = p + 1
    if start < p + 1:
        raise InsufficientSampleError(f"start {start} < p + 1 = {p + 1}")
    dy = np.diff(y)  # dy[i] = Delta y_{i+1}, i = 0..T-1
    rows = T - start + 1
    if rows < 1:
        raise InsufficientSampleError(f"no usable rows for p={p}, T={T}")
    response = dy[start - 1 :]
    ncols = (1 if include_level else 0) + p
    X = np.empty((rows, ncols))
    col = 0
    if include_level:
        X[:, 0] = y[start - 1 : T]
        col = 1
    for j in range(1, p + 1):
        X[:, col + j - 1] = dy[start - 1 - j : T - j]
    return response, X, start


def _ols(X: np.ndarray, z: np.ndarray):
    beta, _, rank, _ = np.linalg.lstsq(X, z, rcond=None)
    if rank < X.shape[1]:
        raise RankDeficientError(
            f"design matrix rank {rank} < {X.shape[1]} columns"
        )
    return beta


def fit_adf(yd, p: int, include_level: bool = True) -> AdfFit:
    """OLS over the effective sample t = p+1..T; no intercept."""
    y = _values(yd)
    T = y.size - 1
    if p < 0:
        raise ValueError("lag order must be non-negative")
    if T - p < p + 2:
        raise InsufficientSampleError(
            f"T - p = {T - p} < p + 2 = {p + 2}: sample too short for p={p}"
        )
    z, X, start = _design(y, p, include_level=include_level)
    beta = _ols(X, z)
    resid = z - X @ beta
    sigma2 = float(resid @ resid) / resid.size
    rho = float(beta[0]) if include_level else 0.0
    delta = beta[1:] if include_level else beta
    return AdfFit(p, rho, np.asarray(delta), resid, sigma2, start, include_level)


def residuals_for_bootstrap(yd, q: int) -> tuple[AdfFit, np.ndarray]:
    """ADF(q) fit plus the full-length residual sequence t = 1..T.

    Pre-sample lagged differences are set to zero so that there are T
    residuals to feed the bootstrap.
    """
    y = _values(yd)
    T = y.size - 1
    fit = fit_adf(y, q)
    dy = np.diff(y)
    resid = dy - fit.rho_hat * y[:T]
    for j in range(1, q + 1):
        lagged = np.zeros(T)
        lagged[j:] = dy[: T - j]
        resid -= fit.delta_hat[j - 1] * lagged
    return fit, resid


@dataclass(frozen=True)
class VarianceProfile:
    """Cumulated normalised squared residuals; evaluable at any s in [0, 1]."""

    cumulative: np.ndarray  # length n + 1, [0, ..., 1]

    def __call__(self, s):
        grid = np.linspace(0.0, 1.0, self.cumulative.size)
        return np.interp(s, grid, self.cumulative)


def variance_profile(residuals) -> VarianceProfile:
    """Piecewise-linear cumulated-squares profile with eta(0)=0, eta(1)=1."""
    u = np.asarray(residuals, dtype=float)
    u2 = u * u
    total = u2.sum()
    if total <= 0.0:
        raise ValueError("variance profile undefined for all-zero residuals")
    cumulative = np.concatenate(([0.0], np.cumsum(u2))) / total
    return VarianceProfile(cumulative)


def kernel_volatility(increments, bandwidth: float = DEFAULT_BANDWIDTH) -> np.ndarray:
    """Gaussian-kernel smoothed squared increments, floored away from zero.

    Returns the variance estimate s_t^2 for each observation of the input.
    """
    x = np.asarray(increments, dtype=float)
    if bandwidth <= 0 or bandwidth > 1:
        raise ValueError(f"bandwidth must be in (0, 1], got {bandwidth}")
    n = x.size
    if n < 5:
        raise InsufficientSampleError("need at least 5 increments")
    x2 = x * x
    w = _kernel_weights(n, bandwidth)
    s2 = (w @ x2) / w.sum(axis=1)
    floor = 1e-12 * x2.mean()
    return np.maximum(s2, max(floor, np.finfo(float).tiny))


@dataclass(frozen=True)
class LagSelection:
    criterion: str  # "maic" | "rsmaic" | "fixed"
    k_max: int
    chosen: int
    scores: np.ndarray = field(default_factory=lambda: np.empty(0))


def _maic_scores(y: np.ndarray, k_max: int) -> np.ndarray:
    """MAIC(p) for p = 0..k_max over the common sample t = k_max+1..T."""
    T = y.size - 1
    n = T - k_max
    if n < k_max + 2:
        raise InsufficientSampleError(
            f"common sample size {n} too small for k_max={k_max}"
        )
    z, X, _ = _design(y, k_max, start=k_max + 1)
    level2 = float(X[:, 0] @ X[:, 0])
    scores = np.empty(k_max + 1)
    for p in range(k_max + 1):
        Xp = X[:, : 1 + p]
        beta = _ols(Xp, z)
        resid = z - Xp @ beta
        sigma2 = float(resid @ resid) / n
        if sigma2 <= 0.0:
            scores[p] = -np.inf
            continue
        tau_T = beta[0] ** 2 * level2 / sigma2
        scores[p] = np.log(sigma2) + 2.0 * (tau_T + p) / n
    return scores


def select_lag(
    yd,
    criterion: str = "rsmaic",
    k_max: int = 8,
    bandwidth: float = DEFAULT_BANDWIDTH,
    fixed: int | None = None,
) -> LagSelection:
    """Pick the ADF lag order by MAIC, its rescaled variant, or a fixed value.

    The rescaled variant divides the first differences by a kernel estimate
    of their local standard deviation, rebuilds the series by partial
    summation from zero and applies the MAIC to the rebuilt series.
    """
    criterion = criterion.lower()
    y = _values(yd)
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    if criterion == "fixed":
        chosen = k_max if fixed is None else int(fixed)
        if not 0 <= chosen <= max(k_max, chosen):
            raise ValueError(f"fixed lag {chosen} out of range")
        return LagSelection("fixed", max(k_max, chosen), chosen)
    if k_max == 0:
        return LagSelection(criterion, 0, 0, np.zeros(1))
    if criterion == "maic":
        scores = _maic_scores(y, k_max)
    elif criterion == "rsmaic":
        dy = np.diff(y)
        s = np.sqrt(kernel_volatility(dy, bandwidth))
        rescaled = np.concatenate(([0.0], np.cumsum(dy / s)))
        scores = _maic_scores(rescaled, k_max)
    else:
        raise ValueError(f"unknown lag selection criterion {criterion!r}")
    chosen = int(np.argmin(scores))  # ties break to the smallest p
    return LagSelection(criterion, k_max, chosen, scores)
