"""Weighted LARS solver for adaptive-lasso solution paths of ADF regressions.

The penalised loss is sum (z - X b)^2 + 2 lambda sum_j w_j^gamma |b_j| with
no intercept and no standardisation. Solving is done on the rescaled design
x_j / w_j^gamma, so the knot lambda values equal the maximal absolute
correlation max_j |x~_j' r| and the KKT condition reads x~_j' r = lambda *
sign(b~_j) on the active set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DegenerateWeightError,
    LevelNeverActivatesError,
    RankDeficientError,
)

__all__ = [
    "PenaltyWeights",
    "KnotEvent",
    "SolutionPath",
    "weighted_lars",
    "first_level_knot",
]


@dataclass(frozen=True)
class PenaltyWeights:
    """Adaptive penalty weights: one for the level column, one per lag."""

    level: float
    lags: np.ndarray
    gamma1: float = 1.0
    gamma2: float = 1.0

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=float)
        object.__setattr__(self, "lags", lags)
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ValueError("penalty exponents must be positive")
        all_w = np.concatenate(([self.level], lags))
        if not np.all(np.isfinite(all_w)) or np.any(all_w <= 0):
            raise DegenerateWeightError(
                "penalty weights must be finite and positive; an infinite "
                "weight signals a zero initial OLS estimate"
            )

    def scales(self) -> np.ndarray:
        """Per-column rescaling factors w_j^gamma (level column first)."""
        return np.concatenate(
            ([self.level**self.gamma1], self.lags**self.gamma2)
        )


@dataclass(frozen=True)
class KnotEvent:
    lam: float
    index: int
    action: str  # "enter" | "drop"
    coefficients: np.ndarray  # original-scale coefficients at the knot
    active: tuple[int, ...]  # active set after the event


@dataclass(frozen=True)
class SolutionPath:
    knots: tuple[KnotEvent, ...]
    level_index: int
    tie_break_used: bool = False

    def entry_events(self, index: int) -> list[KnotEvent]:
        return [k for k in self.knots if k.action == "enter" and k.index == index]


def _tied_argmax(values: np.ndarray, candidates: np.ndarray) -> tuple[int, bool]:
    sub = values[candidates]
    best = sub.max()
    hits = candidates[sub >= best * (1.0 - 1e-12)]
    return int(hits.min()), hits.size > 1


def weighted_lars(
    response,
    design,
    weights: PenaltyWeights,
    level_index: int = 0,
    stop_at_level_entry: bool = False,
) -> SolutionPath:
    """Lasso-modified LARS path on the weight-rescaled design.

    Events are recorded at every knot (activation or deactivation); with
    `stop_at_level_entry` the path terminates at the first knot where the
    level column enters.
    """
    z = np.asarray(response, dtype=float)
    X = np.asarray(design, dtype=float)
    n, m = X.shape
    if z.size != n:
        raise ValueError("response / design length mismatch")
    scale = weights.scales()
    if scale.size != m:
        raise ValueError(f"{scale.size} weights for {m} columns")
    Xt = X / scale

    beta = np.zeros(m)  # tilde coordinates
    c = Xt.T @ z
    inactive = np.ones(m, dtype=bool)
    active: list[int] = []
    signs: list[float] = []
    knots: list[KnotEvent] = []
    tie_flag = False

    def record(lam: float, index: int, action: str):
        knots.append(
            KnotEvent(
                float(lam),
                int(index),
                action,
                (beta / scale).copy(),
                tuple(active),
            )
        )

    # first activation at lambda_max
    j0, tied = _tied_argmax(np.abs(c), np.arange(m))
    tie_flag |= tied
    lam = float(abs(c[j0]))
    active.append(j0)
    signs.append(1.0 if c[j0] >= 0 else -1.0)
    inactive[j0] = False
    record(lam, j0, "enter")
    if stop_at_level_entry and j0 == level_index:
        return SolutionPath(tuple(knots), level_index, tie_flag)

    lam_floor = max(lam, 1.0) * 1e-13
    max_events = 20 * m + 20
    while lam > lam_floor and len(knots) < max_events:
        XA = Xt[:, active]
        G = XA.T @ XA
        s = np.asarray(signs)
        try:
            L = np.linalg.cholesky(G)
            d = np.linalg.solve(L.T, np.linalg.solve(L, s))
        except np.linalg.LinAlgError as exc:
            raise RankDeficientError(
                "active-set Gram matrix is singular (rank-deficient design)"
            ) from exc
        u = XA @ d
        a = Xt.T @ u

        gamma = lam  # reaching lambda = 0 without further events
        event = ("end", -1)
        tol = lam * 1e-12
        idx_in = np.flatnonzero(inactive)
        if idx_in.size:
            with np.errstate(divide="ignore", invalid="ignore"):
                g1 = (lam - c[idx_in]) / (1.0 - a[idx_in])
                g2 = (lam + c[idx_in]) / (1.0 + a[idx_in])
            cand = np.concatenate((g1, g2))
            cand_idx = np.concatenate((idx_in, idx_in))
            ok = np.isfinite(cand) & (cand > tol)
            if ok.any():
                g_enter = cand[ok].min()
                if g_enter < gamma:
                    hits = cand_idx[ok & (cand <= g_enter * (1.0 + 1e-12))]
                    tie_flag |= np.unique(hits).size > 1
                    gamma = g_enter
                    event = ("enter", int(hits.min()))
        drops = np.asarray([-beta[k] / dk if dk != 0 else np.inf for k, dk in zip(active, d)])
        ok = np.isfinite(drops) & (drops > tol)
        if ok.any():
            g_drop = drops[ok].min()
            if g_drop < gamma:
                gamma = g_drop
                pos = int(np.flatnonzero(ok & (drops <= g_drop * (1.0 + 1e-12)))[0])
                event = ("drop", pos)

        for k, dk in zip(active, d):
            beta[k] += gamma * dk
        lam -= gamma
        c -= gamma * a

        kind, which = event
        if kind == "enter":
            active.append(which)
            signs.append(1.0 if c[which] >= 0 else -1.0)
            inactive[which] = False
            record(lam, which, "enter")
            if stop_at_level_entry and which == level_index:
                break
        elif kind == "drop":
            j = active[which]
            beta[j] = 0.0
            del active[which]
            del signs[which]
            inactive[j] = True
            record(lam, j, "drop")
        else:
            break

    path = SolutionPath(tuple(knots), level_index, tie_flag)
    if stop_at_level_entry and not path.entry_events(level_index):
        raise LevelNeverActivatesError(
            "level column never activated on the computed path"
        )
    return path


def first_level_knot(path: SolutionPath) -> float:
    """Lambda of the earliest (largest-lambda) entry of the level column."""
    entries = path.entry_events(path.level_index)
    if not entries:
        raise LevelNeverActivatesError(
            "level column has no activation event on this path"
        )
    return entries[0].lam
