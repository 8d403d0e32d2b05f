"""Wild bootstrap (optionally sieve-recoloured) activation-knot tests.

One bootstrap cycle multiplies the full-length ADF(q) residuals of the
detrended data with i.i.d. mean-zero unit-variance multipliers, filters the
products through the estimated AR(q) sieve, cumulates to a bootstrap series
and recomputes the knot statistic on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .adf import residuals_for_bootstrap
from .exceptions import (
    BootstrapFailureError,
    ConfigError,
    DegenerateWeightError,
    InsufficientSampleError,
    LevelNeverActivatesError,
    RankDeficientError,
)
from .knot_tests import LagRule, TestConfig, TestResult, knot_statistic, tau_statistic
from .prng import SeedStream
from .series import Series, detrend_fd

__all__ = [
    "BootstrapConfig",
    "BootstrapResult",
    "draw_multipliers",
    "recolour",
    "bootstrap_sample",
    "bootstrap_critical_value",
    "run_bootstrap_test",
]

MULTIPLIERS = ("gaussian", "rademacher", "mammen")
_RETRYABLE = (
    RankDeficientError,
    DegenerateWeightError,
    LevelNeverActivatesError,
    InsufficientSampleError,
)

# Mammen two-point distribution: mean 0, variance 1, third moment 1.
_MAMMEN_LO = -(math.sqrt(5.0) - 1.0) / 2.0
_MAMMEN_HI = (math.sqrt(5.0) + 1.0) / 2.0
_MAMMEN_P_LO = (math.sqrt(5.0) + 1.0) / (2.0 * math.sqrt(5.0))


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 499
    q: int | str = "auto"  # "auto" -> q = p of the observed statistic
    p_star: LagRule | None = None  # None -> reuse the observed lag rule
    multiplier: str = "gaussian"
    seed: int = 0
    level: float = 0.05
    scale_replicates: bool = True  # divide tau* by its own sigma2*

    def __post_init__(self):
        if self.B < 1:
            raise ConfigError("B must be at least 1")
        if not 0 < self.level < 1:
            raise ConfigError("level must be in (0, 1)")
        if self.multiplier not in MULTIPLIERS:
            raise ConfigError(f"multiplier must be one of {MULTIPLIERS}")
        if self.q != "auto" and (not isinstance(self.q, int) or self.q < 0):
            raise ConfigError("q must be 'auto' or a non-negative integer")


@dataclass(frozen=True)
class BootstrapResult:
    observed: TestResult
    replicates: np.ndarray  # length B, NaN for failed replicates
    cv: float
    p_value: float
    reject: bool
    q: int
    n_failed: int
    config: BootstrapConfig

    @property
    def n_valid(self) -> int:
        return self.replicates.size - self.n_failed


def draw_multipliers(kind: str, n: int, stream: SeedStream) -> np.ndarray:
    """i.i.d. draws with mean zero and unit variance."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if kind == "gaussian":
        return stream.standard_normal(n)
    gen = stream.generator()
    u = gen.random(n)
    if kind == "rademacher":
        return np.where(u < 0.5, -1.0, 1.0)
    if kind == "mammen":
        return np.where(u < _MAMMEN_P_LO, _MAMMEN_LO, _MAMMEN_HI)
    raise ConfigError(f"unknown multiplier kind {kind!r}")


def recolour(innovations, delta_check) -> np.ndarray:
    """AR(q) filter u_t = sum_j delta_j u_{t-j} + e_t with zero pre-sample."""
    eps = np.asarray(innovations, dtype=float)
    delta = np.atleast_1d(np.asarray(delta_check, dtype=float))
    if delta.size == 0:
        return eps.copy()
    return lfilter([1.0], np.concatenate(([1.0], -delta)), eps)


def bootstrap_sample(residuals, delta_check, multipliers) -> Series:
    """One resampled series: scaled residuals, recoloured, cumulated from 0."""
    resid = np.asarray(residuals, dtype=float)
    xi = np.asarray(multipliers, dtype=float)
    if resid.size != xi.size:
        raise ValueError("residuals / multipliers length mismatch")
    u_star = recolour(xi * resid, delta_check)
    values = np.concatenate(([0.0], np.cumsum(u_star)))
    return Series(values)


def bootstrap_critical_value(replicates: np.ndarray, level: float) -> float:
    """ceil((1 - level) * B)-th order statistic of the replicates.

    This is the smallest observed value whose strict-exceedance fraction is
    at most `level`, matching the decision rule reject iff cv <= statistic.
    """
    reps = np.sort(replicates)
    B = reps.size
    k = int(math.ceil((1.0 - level) * B))
    k = min(max(k, 1), B)
    return float(reps[k - 1])


def run_bootstrap_test(
    y: Series, test_cfg: TestConfig, bs_cfg: BootstrapConfig
) -> BootstrapResult:
    """Full bootstrap test: observed statistic, B replicates, cv and p-value.

    Replicate b draws its multipliers from the (seed, [b]) stream, so each
    replicate is reproducible in isolation and results do not depend on how
    replicates are scheduled. A replicate failing with a degenerate fit is
    retried with fresh multipliers up to 10 times.
    """
    yd = detrend_fd(y, test_cfg.detrend)
    observed = knot_statistic(yd, test_cfg)
    q = observed.lag_p if bs_cfg.q == "auto" else int(bs_cfg.q)
    fit_q, resid = residuals_for_bootstrap(yd, q)

    star_rule = bs_cfg.p_star if bs_cfg.p_star is not None else test_cfg.lag
    star_cfg = TestConfig(
        detrend=test_cfg.detrend,
        gamma1=test_cfg.gamma1,
        gamma2=test_cfg.gamma2,
        lag=star_rule,
        enrichment=test_cfg.enrichment,
    )
    root = SeedStream(bs_cfg.seed, ())
    T = resid.size

    replicates = np.full(bs_cfg.B, np.nan)
    n_failed = 0
    for b in range(bs_cfg.B):
        stream = root.split(b)
        for attempt in range(10):
            xi = draw_multipliers(
                bs_cfg.multiplier, T, stream if attempt == 0 else stream.split(attempt)
            )
            try:
                y_star = bootstrap_sample(resid, fit_q.delta_hat, xi)
                yd_star = detrend_fd(y_star, test_cfg.detrend)
                if test_cfg.enrichment is not None:
                    factor = float(test_cfg.enrichment(yd_star))
                    res = knot_statistic(yd_star, star_cfg, enrich_factor=factor)
                else:
                    res = knot_statistic(yd_star, star_cfg)
                stat = res.statistic
                if not bs_cfg.scale_replicates:
                    stat *= res.sigma2_hat
                replicates[b] = stat
                break
            except _RETRYABLE:
                continue
        else:
            n_failed += 1

    if n_failed > max(1, 0.01 * bs_cfg.B):
        raise BootstrapFailureError(
            f"{n_failed} of {bs_cfg.B} bootstrap replicates failed"
        )
    valid = replicates[np.isfinite(replicates)]
    observed_stat = observed.statistic
    if not bs_cfg.scale_replicates:
        observed_stat = observed_stat * observed.sigma2_hat
    cv = bootstrap_critical_value(valid, bs_cfg.level)
    p_value = float(np.count_nonzero(valid >= observed_stat)) / valid.size
    observed.provenance.update(
        {"B": bs_cfg.B, "q": q, "seed": bs_cfg.seed, "multiplier": bs_cfg.multiplier}
    )
    return BootstrapResult(
        observed=observed,
        replicates=replicates,
        cv=cv,
        p_value=p_value,
        reject=bool(observed_stat >= cv),
        q=q,
        n_failed=n_failed,
        config=bs_cfg,
    )
