"""Monte-Carlo harness: RMSE profiles, oracle index, selector comparison."""

import math

import numpy as np
import pytest

from tailadapt.distributions import pure_pareto, spec_by_name
from tailadapt.montecarlo import (
    RmseProfile,
    compare_selectors,
    default_k_grid,
    oracle_index,
    rmse_profile,
)
from tailadapt.selection import SelectionConfig


class TestRmseProfile:
    def test_pure_pareto_at_k100(self):
        # k gamma_hat(k)/gamma ~ Gamma(k, 1): exact standardized rmse is
        # sqrt(Var[Gamma(k,1)/k]) = 1/sqrt(k)
        prof = rmse_profile(
            pure_pareto(1.0), n=2000, reps=5000, seed=51, k_grid=np.array([100])
        )
        oracle = 1.0 / math.sqrt(100.0)
        assert abs(prof.rmse[0] - oracle) <= 3 * prof.stderr[0]
        assert prof.stderr[0] < 0.002

    def test_deterministic(self):
        a = rmse_profile(pure_pareto(1.0), n=500, reps=50, seed=52)
        b = rmse_profile(pure_pareto(1.0), n=500, reps=50, seed=52)
        np.testing.assert_array_equal(a.rmse, b.rmse)

    def test_workers_do_not_change_results(self):
        a = rmse_profile(spec_by_name("Pcp"), n=500, reps=40, seed=53, workers=1)
        b = rmse_profile(spec_by_name("Pcp"), n=500, reps=40, seed=53, workers=4)
        np.testing.assert_array_equal(a.rmse, b.rmse)
        np.testing.assert_array_equal(a.stderr, b.stderr)

    def test_pareto_curve_scales_like_inverse_sqrt_k(self):
        # log-log slope of the rmse curve over k in [10, n/10] is -1/2
        n = 2000
        grid = np.unique(np.geomspace(10, n // 10, 30).astype(int))
        prof = rmse_profile(pure_pareto(1.0), n=n, reps=1500, seed=54, k_grid=grid)
        slope = np.polyfit(np.log(prof.k_grid), np.log(prof.rmse), 1)[0]
        assert abs(slope + 0.5) <= 0.05

    def test_grid_validation(self):
        with pytest.raises(ValueError, match="k_grid"):
            rmse_profile(pure_pareto(1.0), n=100, reps=5, seed=0, k_grid=np.array([100]))
        with pytest.raises(ValueError, match="reps"):
            rmse_profile(pure_pareto(1.0), n=100, reps=1, seed=0)

    def test_default_grid_shape(self):
        small = default_k_grid(1500)
        np.testing.assert_array_equal(small, np.arange(10, 1500))
        big = default_k_grid(10_000)
        assert big[0] == 10 and big[-1] == 9999
        assert big.size <= 500
        assert np.all(np.diff(big) > 0)

    def test_refinement_adds_integer_neighbourhood(self):
        prof = rmse_profile(
            spec_by_name("t4"), n=4000, reps=120, seed=55, refine=True
        )
        k_star, _ = oracle_index(prof)
        # around the minimum the refined grid is gap-free
        j = int(np.searchsorted(prof.k_grid, k_star))
        lo, hi = max(0, j - 3), min(prof.k_grid.size - 1, j + 3)
        assert np.all(np.diff(prof.k_grid[lo:hi]) == 1)


class TestOracleIndex:
    def test_convex_synthetic_profile(self):
        grid = np.arange(1, 30)
        rmse = (grid - 12.0) ** 2 + 1.0
        prof = RmseProfile(
            spec=pure_pareto(1.0),
            n=100,
            reps=10,
            k_grid=grid,
            rmse=rmse,
            stderr=np.zeros_like(rmse),
        )
        assert oracle_index(prof) == (12, 1.0)

    def test_ties_break_toward_smaller_k(self):
        grid = np.arange(1, 6)
        prof = RmseProfile(
            spec=pure_pareto(1.0),
            n=100,
            reps=10,
            k_grid=grid,
            rmse=np.array([3.0, 2.0, 2.0, 2.0, 4.0]),
            stderr=np.zeros(5),
        )
        assert oracle_index(prof)[0] == 2

    def test_oracle_minimizes_profile(self):
        prof = rmse_profile(spec_by_name("H"), n=2000, reps=200, seed=56)
        _, rmse_star = oracle_index(prof)
        assert np.all(rmse_star <= prof.rmse[~np.isnan(prof.rmse)])

    @pytest.mark.slow
    def test_t10_oracle_rmse(self):
        # heavy-bias regime: the optimal index is tiny and the optimal
        # standardized RMSE is large (published value 0.53 +- 15%)
        prof = rmse_profile(
            spec_by_name("t10"),
            n=10_000,
            reps=2000,
            seed=62,
            k_grid=np.arange(2, 200),
        )
        _, rmse_star = oracle_index(prof)
        assert abs(rmse_star - 0.53) <= 0.15 * 0.53


class TestCompareSelectors:
    def test_pure_pareto_lepski_ratio_at_least_one(self):
        # the oracle minimizes the median error by construction up to MC
        # noise; for pure Pareto the lepski index is close to the oracle
        row = compare_selectors(
            "pp", pure_pareto(1.0), n=2000, reps=300, seed=57, refine=False
        )
        assert row.ratio_rmse_lepski >= 0.9
        assert row.k_star >= 1

    def test_deterministic_across_workers(self):
        kwargs = dict(n=600, reps=60, seed=58, refine=False)
        a = compare_selectors("Pcp", spec_by_name("Pcp"), workers=1, **kwargs)
        b = compare_selectors("Pcp", spec_by_name("Pcp"), workers=3, **kwargs)
        assert a.to_json() == b.to_json()

    def test_explicit_k_star(self):
        row = compare_selectors(
            "pp",
            pure_pareto(1.0),
            n=600,
            reps=50,
            seed=59,
            k_star=200,
            refine=False,
        )
        assert row.k_star == 200

    def test_replicate_collection(self):
        row = compare_selectors(
            "t4",
            spec_by_name("t4"),
            n=600,
            reps=25,
            seed=60,
            collect_replicates=True,
            refine=False,
        )
        rep = row.replicates
        assert rep is not None
        assert rep["k_lepski"].shape == (25,)
        assert np.all(rep["err_star"] >= 0)

    def test_config_threaded_through(self):
        # a huge c makes the practical rule keep the whole trace
        row = compare_selectors(
            "pp",
            pure_pareto(1.0),
            n=600,
            reps=20,
            seed=61,
            config=SelectionConfig(c=1e4),
            refine=False,
            collect_replicates=True,
        )
        assert np.all(row.replicates["k_lepski"] == 599)
