import numpy as np
import pytest

from lassoroot import (
    DegenerateWeightError,
    LevelNeverActivatesError,
    PenaltyWeights,
    SeedStream,
    SolutionPath,
    first_level_knot,
    fit_adf,
    weighted_lars,
)
from lassoroot.adf import _design
from oracles import cd_level_entry_knot


def adf_problem(seed, T, p):
    steps = SeedStream(seed).standard_normal(T)
    y = np.concatenate(([0.0], np.cumsum(steps)))
    fit = fit_adf(y, p)
    weights = PenaltyWeights(
        1.0 / abs(fit.rho_hat),
        1.0 / np.abs(fit.delta_hat) if p else np.empty(0),
    )
    z, X, _ = _design(y, p)
    return z, X, weights, fit


class TestWeightedLars:
    def test_single_regressor_closed_form(self):
        z, X, weights, fit = adf_problem(1, 60, 0)
        path = weighted_lars(z, X, weights, stop_at_level_entry=True)
        lam0 = first_level_knot(path)
        assert lam0 == pytest.approx(abs(fit.rho_hat) * abs(X[:, 0] @ z), rel=1e-12)
        assert path.knots[0].index == 0

    def test_orthogonal_design_entry_order(self):
        n = 32
        X = np.zeros((n, 4))
        for j in range(4):
            X[j * 8 : (j + 1) * 8, j] = 1.0
        coef = np.array([3.0, -1.0, 2.0, 0.5])
        z = X @ coef
        weights = PenaltyWeights(1.0, np.ones(3))
        path = weighted_lars(z, X, weights)
        cors = np.abs(X.T @ z)
        order = list(np.argsort(-cors))
        entries = [k for k in path.knots if k.action == "enter"]
        assert [k.index for k in entries[:4]] == order
        for k, j in zip(entries[:4], order):
            assert k.lam == pytest.approx(cors[j], rel=1e-10)

    @pytest.mark.parametrize("seed,p", [(10, 3), (11, 3), (12, 2), (13, 4)])
    def test_matches_coordinate_descent_oracle(self, seed, p):
        z, X, weights, _ = adf_problem(seed, 50, p)
        path = weighted_lars(z, X, weights, stop_at_level_entry=True)
        lam0 = first_level_knot(path)
        oracle = cd_level_entry_knot(z, X, weights.scales())
        assert lam0 == pytest.approx(oracle, rel=1e-4)

    @pytest.mark.parametrize("seed,p", [(20, 3), (21, 4)])
    def test_knot_matches_displayed_formula(self, seed, p):
        z, X, weights, fit = adf_problem(seed, 50, p)
        path = weighted_lars(z, X, weights, stop_at_level_entry=True)
        entry = path.entry_events(0)[0]
        delta_at_knot = entry.coefficients[1:]
        formula = abs(fit.rho_hat) * abs(X[:, 0] @ (z - X[:, 1:] @ delta_at_knot))
        assert first_level_knot(path) == pytest.approx(formula, rel=1e-10)

    @pytest.mark.parametrize("seed,p", [(30, 2), (31, 3), (32, 4)])
    def test_equicorrelation_at_every_knot(self, seed, p):
        z, X, weights, _ = adf_problem(seed, 60, p)
        path = weighted_lars(z, X, weights)
        Xt = X / weights.scales()
        for knot in path.knots:
            beta_t = knot.coefficients * weights.scales()
            r = z - Xt @ beta_t
            cors = np.abs(Xt.T @ r)
            scale = max(knot.lam, 1.0)
            for j in range(X.shape[1]):
                if j in knot.active:
                    assert cors[j] == pytest.approx(knot.lam, abs=1e-8 * scale)
                else:
                    assert cors[j] <= knot.lam + 1e-8 * scale

    def test_rescaling_equivalence(self):
        z, X, weights, _ = adf_problem(40, 50, 3)
        path = weighted_lars(z, X, weights)
        k = 3.0
        scaled = PenaltyWeights(k * weights.level, k * weights.lags)
        path_k = weighted_lars(z, X, scaled)
        assert [e.index for e in path.knots] == [e.index for e in path_k.knots]
        for a, b in zip(path.knots, path_k.knots):
            assert b.lam == pytest.approx(a.lam / k, rel=1e-9)

    def test_degenerate_weight_rejected(self):
        with pytest.raises(DegenerateWeightError):
            PenaltyWeights(np.inf, np.ones(2))
        with pytest.raises(DegenerateWeightError):
            PenaltyWeights(1.0, np.array([1.0, 0.0]))

    def test_coefficient_paths_start_at_zero(self):
        z, X, weights, _ = adf_problem(41, 50, 2)
        path = weighted_lars(z, X, weights)
        np.testing.assert_array_equal(path.knots[0].coefficients, 0.0)


class TestFirstLevelKnot:
    def test_level_first_at_lambda_max(self):
        z, X, weights, fit = adf_problem(1, 60, 0)
        path = weighted_lars(z, X, weights)
        Xt = X / weights.scales()
        assert first_level_knot(path) == pytest.approx(np.max(np.abs(Xt.T @ z)))

    def test_missing_level_entry_signalled(self):
        path = SolutionPath(knots=(), level_index=0)
        with pytest.raises(LevelNeverActivatesError):
            first_level_knot(path)

    def test_later_entry_matches_oracle(self):
        # pick an instance where the level is not the first variable in
        for seed in range(50, 80):
            z, X, weights, _ = adf_problem(seed, 50, 3)
            path = weighted_lars(z, X, weights, stop_at_level_entry=True)
            if path.knots[0].index != 0 and len(path.knots) >= 3:
                oracle = cd_level_entry_knot(z, X, weights.scales())
                assert first_level_knot(path) == pytest.approx(oracle, rel=1e-4)
                return
        pytest.fail("no instance with a delayed level entry found")
