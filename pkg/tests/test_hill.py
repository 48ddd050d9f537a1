"""Hill traces: exact values, streaming/direct equivalence, distribution."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from tailadapt.distributions import (
    SortedSample,
    eta_exp_integral,
    pareto_change_point,
    pure_pareto,
    sample,
    spec_by_name,
    von_mises_eta,
)
from tailadapt.errors import InsufficientPositiveDataError
from tailadapt.hill import (
    HillTrace,
    hill_from_representation,
    hill_trace,
    hill_trace_direct,
)

PCP = pareto_change_point(1.5, 1.0, 15.0)


class TestHillTrace:
    def test_exact_logs(self):
        # (e^2, e, 1): gamma_hat(1) = ln(e^2/e) = 1,
        # gamma_hat(2) = (ln e^2 + ln e)/2 - ln 1 = 1.5 by the definition
        tr = hill_trace(SortedSample(np.array([math.e**2, math.e, 1.0])))
        assert tr.at(1) == pytest.approx(1.0, abs=1e-12)
        assert tr.at(2) == pytest.approx(1.5, abs=1e-12)

    def test_powers_of_two_against_direct_definition(self):
        s = SortedSample(np.array([8.0, 4.0, 2.0, 1.0]))
        tr = hill_trace(s)
        oracle = hill_trace_direct(s)
        np.testing.assert_allclose(tr.gammas, oracle.gammas, atol=1e-12)
        ln2 = math.log(2.0)
        np.testing.assert_allclose(
            tr.gammas, [ln2, 1.5 * ln2, 2.0 * ln2], atol=1e-12
        )

    def test_requires_two_positive(self):
        with pytest.raises(InsufficientPositiveDataError):
            hill_trace(SortedSample(np.array([5.0, -1.0, -2.0])))

    def test_restricts_to_positive_part(self):
        with_neg = SortedSample(np.array([8.0, 4.0, 2.0, -1.0, -3.0]))
        only_pos = SortedSample(np.array([8.0, 4.0, 2.0]))
        np.testing.assert_allclose(
            hill_trace(with_neg).gammas, hill_trace(only_pos).gammas
        )
        assert hill_trace(with_neg).n == 3

    def test_streaming_equals_direct_on_random_samples(self, rng):
        for _ in range(100):
            n = int(rng.integers(3, 51))
            draws = np.exp(rng.normal(size=n) * rng.uniform(0.5, 2.0))
            s = SortedSample.from_draws(draws)
            fast = hill_trace(s).gammas
            slow = hill_trace_direct(s).gammas
            np.testing.assert_allclose(fast, slow, atol=1e-12)

    @given(st.floats(min_value=1e-6, max_value=1e6))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, c):
        s = sample(PCP, 300, 17)
        base = hill_trace(s).gammas
        scaled = hill_trace(SortedSample(s.values * c)).gammas
        np.testing.assert_allclose(scaled, base, atol=1e-10)

    def test_gamma_law_mean(self):
        # pure Pareto: k gamma_hat(k) / gamma is Gamma(k, 1), so the mean of
        # gamma_hat(100) over reps is gamma with sd gamma/sqrt(100 reps)
        reps, k, gamma = 2000, 100, 1.0
        vals = np.empty(reps)
        spec = pure_pareto(gamma)
        for r in range(reps):
            vals[r] = hill_trace(sample(spec, 1000, (18, r))).at(k)
        assert abs(vals.mean() - gamma) <= 3.0 * gamma / math.sqrt(k * reps)

    @pytest.mark.parametrize("k", [5, 50, 500])
    def test_gamma_law_ks(self, k):
        # kolmogorov-smirnov of k gamma_hat(k)/gamma against Gamma(k, 1)
        reps, gamma = 5000, 1.0
        spec = pure_pareto(gamma)
        n = max(2 * k, 64)
        vals = np.empty(reps)
        for r in range(reps):
            vals[r] = hill_trace(sample(spec, n, (19, k, r))).at(k)
        stat = stats.kstest(k * vals / gamma, "gamma", args=(k,))
        assert stat.pvalue > 0.01


class TestHillTraceType:
    def test_length_bound(self):
        with pytest.raises(ValueError, match="longer"):
            HillTrace(gammas=np.ones(5), n=5)

    def test_at_bounds(self):
        tr = HillTrace(gammas=np.array([1.0, 2.0]), n=3)
        assert tr.at(2) == 2.0
        with pytest.raises(IndexError):
            tr.at(3)


class TestRepresentation:
    def test_zero_eta_matches_pure_pareto_law(self):
        # with eta == 0 the representation reduces to rescaled Gamma sums
        reps, k, gamma = 2000, 50, 2.0
        vals = np.empty(reps)
        for r in range(reps):
            tr = hill_from_representation(
                gamma, lambda s: 0.0, n=500, k_max=k, seed=(21, r)
            )
            vals[r] = tr.at(k)
        stat = stats.kstest(k * vals / gamma, "gamma", args=(k,))
        assert stat.pvalue > 0.01

    @pytest.mark.parametrize("k", [20, 200])
    def test_change_point_matches_direct_sampling(self, k):
        # two-sample KS between representation-based and direct Hill values
        reps, n = 2000, 2000
        integral = eta_exp_integral(PCP)
        rep_vals = np.empty(reps)
        dir_vals = np.empty(reps)
        for r in range(reps):
            tr = hill_from_representation(
                PCP.gamma_true,
                lambda s: von_mises_eta(PCP, s),
                n=n,
                k_max=k,
                seed=(22, k, r),
                eta_integral=integral,
            )
            rep_vals[r] = tr.at(k)
            dir_vals[r] = hill_trace(sample(PCP, n, (23, k, r))).at(k)
        stat = stats.ks_2samp(rep_vals, dir_vals)
        assert stat.pvalue > 0.01

    def test_h_dist_mean_matches_direct_sampling(self):
        spec = spec_by_name("H")
        reps, n, k = 800, 10_000, 100
        integral = eta_exp_integral(spec)
        rep_vals = np.empty(reps)
        dir_vals = np.empty(reps)
        for r in range(reps):
            tr = hill_from_representation(
                spec.gamma_true,
                lambda s: von_mises_eta(spec, s),
                n=n,
                k_max=k,
                seed=(24, r),
                eta_integral=integral,
            )
            rep_vals[r] = tr.at(k)
            dir_vals[r] = hill_trace(sample(spec, n, (25, r))).at(k)
        pooled_se = math.sqrt(
            rep_vals.var(ddof=1) / reps + dir_vals.var(ddof=1) / reps
        )
        assert abs(rep_vals.mean() - dir_vals.mean()) <= 3.0 * pooled_se

    def test_quadrature_fallback_matches_exact_integral(self):
        # same stream, exact vs quadrature segment integration
        exact = hill_from_representation(
            PCP.gamma_true,
            lambda s: von_mises_eta(PCP, s),
            n=300,
            k_max=40,
            seed=26,
            eta_integral=eta_exp_integral(PCP),
        )
        quad = hill_from_representation(
            PCP.gamma_true,
            lambda s: float(von_mises_eta(PCP, s)),
            n=300,
            k_max=40,
            seed=26,
        )
        np.testing.assert_allclose(quad.gammas, exact.gammas, atol=1e-7)

    def test_k_max_validation(self):
        with pytest.raises(ValueError):
            hill_from_representation(1.0, lambda s: 0.0, n=100, k_max=100, seed=0)
