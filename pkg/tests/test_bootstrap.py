from fractions import Fraction

import numpy as np
import pytest

import lassoroot.bootstrap as bootstrap_mod
from lassoroot import (
    BootstrapConfig,
    ConfigError,
    LagRule,
    SeedStream,
    Series,
    TestConfig,
    bootstrap_sample,
    detrend_fd,
    diff,
    draw_multipliers,
    recolour,
    run_bootstrap_test,
    tau_statistic,
)
from lassoroot.bootstrap import bootstrap_critical_value
from oracles import recolour_recursion

P0 = LagRule("fixed", fixed=0)


class TestDrawMultipliers:
    def test_gaussian_moments(self):
        x = draw_multipliers("gaussian", 10**6, SeedStream(1))
        assert abs(x.mean()) < 0.005
        assert abs(x.var() - 1.0) < 0.01

    def test_rademacher_support(self):
        x = draw_multipliers("rademacher", 10000, SeedStream(2))
        assert set(np.unique(x)) == {-1.0, 1.0}
        assert abs(x.mean()) < 0.05

    def test_mammen_two_point_moments_exactly(self):
        # exact arithmetic on the two-point construction via (a, b) with
        # a*b = -1 and b - a = 1 gives mean 0, variance 1, third moment 1
        import sympy

        five = sympy.sqrt(5)
        a = -(five - 1) / 2
        b = (five + 1) / 2
        p = (five + 1) / (2 * five)
        mean = sympy.simplify(p * a + (1 - p) * b)
        var = sympy.simplify(p * a**2 + (1 - p) * b**2)
        third = sympy.simplify(p * a**3 + (1 - p) * b**3)
        assert mean == 0
        assert var == 1
        assert third == 1
        # and the implementation uses exactly those parameters
        x = draw_multipliers("mammen", 200_000, SeedStream(3))
        assert set(np.round(np.unique(x), 12)) <= {
            round(float(a), 12),
            round(float(b), 12),
        }
        assert abs(x.mean()) < 0.01

    def test_deterministic_per_stream(self):
        a = draw_multipliers("gaussian", 16, SeedStream(4, (1,)))
        b = draw_multipliers("gaussian", 16, SeedStream(4, (1,)))
        np.testing.assert_array_equal(a, b)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            draw_multipliers("gaussian", 0, SeedStream(5))


class TestRecolour:
    def test_q0_identity(self):
        eps = np.array([1.0, -2.0, 0.5])
        np.testing.assert_array_equal(recolour(eps, []), eps)

    def test_hand_recursion(self):
        out = recolour([1.0, 0.0, 0.0], [0.5])
        np.testing.assert_allclose(out, [1.0, 0.5, 0.25], atol=1e-15)

    def test_matches_direct_recursion(self):
        eps = SeedStream(6).standard_normal(200)
        delta = np.array([0.4, -0.25, 0.1])
        np.testing.assert_allclose(
            recolour(eps, delta), recolour_recursion(eps, delta), atol=1e-12
        )


class TestBootstrapSample:
    def test_zero_multipliers_give_flat_series(self):
        resid = SeedStream(7).standard_normal(30)
        y = bootstrap_sample(resid, [], np.zeros(30))
        np.testing.assert_array_equal(y.values, 0.0)

    def test_unit_multipliers_cumulate_residuals(self):
        resid = SeedStream(8).standard_normal(40)
        y = bootstrap_sample(resid, [], np.ones(40))
        np.testing.assert_allclose(y.values, np.concatenate(([0.0], np.cumsum(resid))))

    def test_diff_inverts_partial_sum(self):
        resid = SeedStream(9).standard_normal(25)
        xi = SeedStream(10).standard_normal(25)
        delta = [0.3, -0.1]
        y = bootstrap_sample(resid, delta, xi)
        u_star = recolour(xi * resid, delta)
        np.testing.assert_allclose(diff(y), u_star, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            bootstrap_sample(np.ones(5), [], np.ones(4))


class TestCriticalValue:
    def test_order_statistic_reading(self):
        assert bootstrap_critical_value(np.array([1.0, 2.0, 3.0, 4.0]), 0.25) == 3.0

    def test_counting_pvalue_example(self, random_walk):
        reps = np.array([1.0, 2.0, 3.0, 4.0])
        stat = 2.5
        p = np.count_nonzero(reps >= stat) / reps.size
        assert p == 0.5
        assert not stat >= bootstrap_critical_value(reps, 0.25)

    def test_granularity_is_one_over_B(self):
        # 49 exceedances out of 4999 replicates
        assert 49 / 4999 == pytest.approx(0.00980196039207842, abs=1e-15)


class TestRunBootstrapTest:
    CFG = TestConfig(detrend="constant", lag=LagRule("rsmaic", 2))

    def test_determinism(self, random_walk):
        y = random_walk(11, 80)
        bs = BootstrapConfig(B=29, seed=5)
        a = run_bootstrap_test(y, self.CFG, bs)
        b = run_bootstrap_test(y, self.CFG, bs)
        np.testing.assert_array_equal(a.replicates, b.replicates)
        assert a.p_value == b.p_value and a.cv == b.cv

    def test_replicates_independent_of_schedule(self, random_walk):
        # recomputing single replicates in shuffled order reproduces the
        # batch run bit-for-bit (streams are addressed, not sequential)
        y = random_walk(12, 80)
        bs = BootstrapConfig(B=13, seed=9)
        batch = run_bootstrap_test(y, self.CFG, bs)
        order = np.random.default_rng(0).permutation(13)
        for b in order:
            single = run_bootstrap_test(
                y, self.CFG, BootstrapConfig(B=int(b) + 1, seed=9)
            )
            assert single.replicates[b] == batch.replicates[b]

    def test_degenerate_multipliers_collapse_distribution(self, random_walk, monkeypatch):
        y = random_walk(13, 100)
        cfg = TestConfig(detrend="constant", lag=P0)

        def ones(kind, n, stream):
            return np.ones(n)

        monkeypatch.setattr(bootstrap_mod, "draw_multipliers", ones)
        res = run_bootstrap_test(y, cfg, BootstrapConfig(B=7, q=0, seed=1))
        assert np.ptp(res.replicates) == 0.0
        # the single point equals the statistic of the cumulated residuals
        yd = detrend_fd(y, "constant")
        from lassoroot.adf import residuals_for_bootstrap

        _, resid = residuals_for_bootstrap(yd, 0)
        y_star = Series(np.concatenate(([0.0], np.cumsum(resid))))
        expected = tau_statistic(y_star, cfg).statistic
        assert res.replicates[0] == pytest.approx(expected, rel=1e-12)

    def test_scale_invariance_of_pvalue(self, random_walk):
        y = random_walk(14, 90)
        bs = BootstrapConfig(B=49, seed=3)
        base = run_bootstrap_test(y, self.CFG, bs)
        scaled = run_bootstrap_test(Series(4.0 * y.values), self.CFG, bs)
        assert scaled.p_value == base.p_value
        assert scaled.reject == base.reject

    def test_decision_triple_consistency(self, random_walk):
        for seed in range(25):
            res = run_bootstrap_test(
                random_walk(100 + seed, 70),
                self.CFG,
                BootstrapConfig(B=19, seed=seed, level=0.10),
            )
            assert res.reject == (res.observed.statistic >= res.cv)
            assert res.reject == (res.p_value <= 0.10 + 1e-12) or np.isclose(
                res.p_value, 0.10, atol=1.0 / 19
            )

    def test_q_zero_and_explicit_q(self, random_walk):
        y = random_walk(15, 90)
        res0 = run_bootstrap_test(y, self.CFG, BootstrapConfig(B=9, q=0, seed=2))
        res2 = run_bootstrap_test(y, self.CFG, BootstrapConfig(B=9, q=2, seed=2))
        assert res0.q == 0 and res2.q == 2
        assert not np.array_equal(res0.replicates, res2.replicates)

    def test_auto_q_equals_observed_lag(self, random_walk):
        y = random_walk(16, 120)
        res = run_bootstrap_test(y, self.CFG, BootstrapConfig(B=5, seed=4))
        assert res.q == res.observed.lag_p

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            BootstrapConfig(B=0)
        with pytest.raises(ConfigError):
            BootstrapConfig(level=1.5)
        with pytest.raises(ConfigError):
            BootstrapConfig(multiplier="uniform")
        with pytest.raises(ConfigError):
            BootstrapConfig(q=-1)
