"""Empirical verification suite: bound checks and lower-bound arithmetic."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from tailadapt.distributions import h_dist, pareto_change_point, pure_pareto
from tailadapt.errors import HypothesesNotMetError, InsufficientRepsError
from tailadapt.verify import (
    check_bias_identity,
    check_gamma_tail,
    check_maxdev_scaling,
    check_order_stat_tail,
    check_variance_bounds,
    eta_envelope_margin,
    kl_changepoint,
    kl_changepoint_mc,
    lower_bound_family,
    simulate_y_order_stat,
)

PCP = pareto_change_point(1.5, 1.0, 15.0)
V_MAX = math.e / (1.0 + 2.0 * math.e)


class TestVarianceBounds:
    def test_pure_pareto_collapses_to_gamma_sq_over_k(self):
        rep = check_variance_bounds(pure_pareto(1.0), 50, 5000, 3000, 71)
        assert rep.passed
        assert rep.measured["mean_eta_bar"] == 0.0
        assert rep.bound["lower"] == rep.bound["upper"] == pytest.approx(1.0 / 50)
        assert rep.measured["var_hat"] * 50 == pytest.approx(1.0, abs=0.1)

    def test_change_point(self):
        rep = check_variance_bounds(PCP, 100, 10_000, 3000, 72)
        assert rep.passed

    def test_h_dist_with_analytic_eta_bar(self):
        rep = check_variance_bounds(h_dist(), 100, 10_000, 3000, 73)
        assert rep.passed
        # eta_bar(e^Y) with e^Y near n/k = 100 is about (2/t) ln t
        assert rep.measured["mean_eta_bar"] == pytest.approx(
            2 * math.log(100) / 100, rel=0.2
        )

    def test_report_shape(self):
        rep = check_variance_bounds(pure_pareto(2.0), 20, 1000, 500, 74)
        doc = rep.to_json()
        assert set(doc) == {"check", "params", "measured", "bound", "margin", "pass"}


class TestBiasIdentity:
    def test_pure_pareto_both_sides_zero(self):
        rep = check_bias_identity(pure_pareto(1.0), 50, 2000, 2000, 75)
        assert rep.passed
        assert abs(rep.measured["mean_difference"]) <= 3 * rep.measured["stderr"]

    def test_change_point_deep_index(self):
        rep = check_bias_identity(PCP, 500, 10_000, 3000, 76)
        assert rep.passed

    def test_h_dist(self):
        rep = check_bias_identity(h_dist(), 100, 10_000, 2000, 77)
        assert rep.passed


class TestGammaTail:
    def test_k100_delta01(self):
        rep = check_gamma_tail(100, 100_000, 0.1, 78)
        assert rep.passed
        assert rep.measured["frequency"] <= 0.2 + 0.004

    def test_k10_delta001(self):
        rep = check_gamma_tail(10, 100_000, 0.01, 79)
        assert rep.passed

    def test_vacuous_bound(self):
        rep = check_gamma_tail(10, 100, 0.5, 80)
        assert rep.passed
        assert rep.margin == math.inf


class TestOrderStatTail:
    def test_n1e4_k100(self):
        rep = check_order_stat_tail(10_000, 100, 0.1, 100_000, 81)
        assert rep.passed
        assert rep.measured["frequency"] >= 0.896

    def test_n1e3_k30(self):
        rep = check_order_stat_tail(1000, 30, 0.01, 100_000, 82)
        assert rep.passed
        assert rep.measured["frequency"] >= 0.987

    def test_requires_k_below_n(self):
        with pytest.raises(ValueError):
            check_order_stat_tail(100, 100, 0.1, 10, 83)

    def test_beta_route_matches_partial_sums(self):
        # KS between the two simulation routes for Y_(k+1)
        a = simulate_y_order_stat(200, 20, 4000, 84, method="beta")
        b = simulate_y_order_stat(200, 20, 4000, 85, method="partial-sum")
        assert stats.ks_2samp(a, b).pvalue > 0.01


class TestMaxdevScaling:
    def test_three_sizes(self):
        rep = check_maxdev_scaling([1000, 10_000, 100_000], 300, 86)
        assert rep.passed
        assert 0.5 <= rep.measured["slope"] <= 1.5

    def test_single_size_floor(self):
        rep = check_maxdev_scaling([10_000], 300, 87)
        n = 10_000
        assert rep.measured["medians"][n] >= 0.5 * math.sqrt(
            2 * math.log(math.log(n))
        )

    def test_insufficient_reps(self):
        with pytest.raises(InsufficientRepsError):
            check_maxdev_scaling([1000], 1, 88)


class TestKlChangepoint:
    def test_zero_at_equal_indices(self):
        assert kl_changepoint(1.0, 1.0, 5.0).kl == 0.0

    def test_closed_form_value(self):
        kl = kl_changepoint(1.0, 2.0, math.e)
        assert kl.kl == pytest.approx(math.exp(-1) * (1 - math.log(2)), abs=1e-15)

    def test_quadratic_bound_dominates(self):
        kl = kl_changepoint(1.0, 1.7, 4.0)
        assert kl.kl <= kl.quadratic_bound

    @given(
        st.floats(min_value=0.1, max_value=5.0),
        st.floats(min_value=0.1, max_value=5.0),
        st.floats(min_value=1.01, max_value=1e4),
    )
    @settings(max_examples=100, deadline=None)
    def test_nonnegative_and_zero_iff_equal(self, gamma, gamma_i, tau):
        kl = kl_changepoint(gamma, gamma_i, tau).kl
        assert kl >= 0.0
        if abs(gamma - gamma_i) > 1e-9:
            assert kl > 0.0

    def test_monte_carlo_cross_check(self):
        target = kl_changepoint(1.0, 2.0, math.e).kl
        est, se = kl_changepoint_mc(1.0, 2.0, math.e, 1_000_000, 89)
        assert abs(est - target) <= 3 * se


class TestLowerBoundFamily:
    def test_flagship_construction(self):
        fam = lower_bound_family(1.0, -1.5, 1_000_000, V_MAX)
        assert fam.M == 13
        assert len(fam.alternatives) == 13
        budget = fam.v * math.log(fam.M)
        for alt in fam.alternatives:
            assert fam.n * alt.kl_i <= budget * (1 + 1e-12)
            assert alt.gamma_i > fam.gamma0  # positive perturbation
            assert alt.rho_i < 0
            assert alt.kl_i <= alt.kl_quad_i

    def test_eta_envelope(self):
        fam = lower_bound_family(1.0, -1.5, 1_000_000, V_MAX)
        assert eta_envelope_margin(fam, points=100) >= -1e-9

    def test_rho_hypothesis(self):
        with pytest.raises(HypothesesNotMetError, match="rho"):
            lower_bound_family(1.0, -0.5, 1_000_000, V_MAX)

    def test_v_hypothesis(self):
        with pytest.raises(HypothesesNotMetError, match="v"):
            lower_bound_family(1.0, -1.5, 1_000_000, 0.9)

    def test_m_hypothesis(self):
        # small n makes floor(ln n) fall below e^(1/v)
        with pytest.raises(HypothesesNotMetError, match="M"):
            lower_bound_family(1.0, -1.5, 1000, V_MAX)

    def test_default_v_is_upper_bound(self):
        fam = lower_bound_family(1.0, -1.5, 1_000_000)
        assert fam.v == V_MAX

    def test_c_rho_value(self):
        fam = lower_bound_family(1.0, -1.5, 1_000_000, V_MAX)
        assert fam.c_rho == pytest.approx(1.0 - math.exp(-1.0 / (2.0 * 16.0)))

    def test_separation_holds_pairwise(self):
        fam = lower_bound_family(1.0, -2.0, 10_000_000, V_MAX)
        scale = fam.n / (fam.v * math.log(fam.M))
        for i in range(1, fam.M + 1):
            a_i = fam.alternatives[i - 1]
            floor = (
                0.5 * fam.c_rho * scale ** (a_i.rho_i / (1 + 2 * abs(a_i.rho_i)))
            )
            for j in range(1, i):
                a_j = fam.alternatives[j - 1]
                gap = abs(a_j.gamma_i - a_i.gamma_i) / a_i.gamma_i
                assert gap >= floor * (1 - 1e-12)
