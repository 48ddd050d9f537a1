"""Empirical verification of the finite-sample guarantees.

Each check is deterministic given its seed and returns a
:class:`VerifyReport` carrying the measured quantities, the bound they are
tested against, the slack in 3-sigma units and a pass flag.  Pass
thresholds use 3-sigma Monte-Carlo margins throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from tailadapt.distributions import (
    DistributionSpec,
    _quantile_transform,
    bias_b,
    eta_bar,
    pareto_change_point,
    pure_pareto,
)
from tailadapt.errors import HypothesesNotMetError, InsufficientRepsError
from tailadapt.rng import Seed, derive_stream

_CHUNK = 256


@dataclass
class VerifyReport:
    check: str
    params: dict
    measured: dict
    bound: dict
    margin: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "measured": self.measured,
            "bound": self.bound,
            "margin": self.margin,
            "pass": self.passed,
        }


# -- shared simulation helpers -------------------------------------------------


def _batch_gamma_at_k(
    spec: DistributionSpec, k: int, n: int, reps: int, seed: Seed
) -> np.ndarray:
    """gamma_hat(k) over reps replicates, vectorised in fixed-size chunks.

    Direct evaluation of (1/k) sum ln X_(i) - ln X_(k+1) on sorted draws;
    restricted to quantile-transform families (all positive support).
    """
    out = np.empty(reps)
    done = 0
    chunk_idx = 0
    while done < reps:
        m = min(_CHUNK, reps - done)
        rg = derive_stream(seed, 101, chunk_idx)
        e = rg.standard_exponential((m, n))
        x = _quantile_transform(spec, e)
        x.sort(axis=1)
        logs = np.log(x[:, ::-1][:, : k + 1])
        out[done : done + m] = logs[:, :k].mean(axis=1) - logs[:, k]
        done += m
        chunk_idx += 1
    return out


def simulate_y_order_stat(
    n: int, k: int, reps: int, seed: Seed, method: str = "beta"
) -> np.ndarray:
    """Draws of Y_(k+1), the (k+1)-th largest exponential order statistic.

    ``beta`` uses exp(-Y_(k+1)) ~ Beta(k+1, n-k) (the law of the
    corresponding uniform order statistic); ``partial-sum`` builds
    sum_{i=k+1}^n E_i/i from rescaled spacings.  Both routes have the same
    law; the slower one exists to cross-check the fast one.
    """
    rg = derive_stream(seed, 102)
    if method == "beta":
        return -np.log(rg.beta(k + 1, n - k, size=reps))
    if method == "partial-sum":
        out = np.empty(reps)
        denom = np.arange(k + 1, n + 1, dtype=float)
        done = 0
        while done < reps:
            m = min(_CHUNK, reps - done)
            e = rg.standard_exponential((m, n - k))
            out[done : done + m] = (e / denom).sum(axis=1)
            done += m
        return out
    raise ValueError(f"unknown method {method!r}")


# -- checks --------------------------------------------------------------------


def check_variance_bounds(
    spec: DistributionSpec, k: int, n: int, reps: int, seed: Seed
) -> VerifyReport:
    """Two-sided bound on Var[gamma_hat(k)] - gamma^2/k via eta_bar.

    Monte-Carlo estimates of the variance and of
    E[eta_bar(e^{Y_(k+1)})], E[eta_bar^2] are compared through

        gamma^2/k - (2 gamma/k) E[eta_bar] <= Var
            <= gamma^2/k + (2 gamma/k) E[eta_bar] + (5/k) E[eta_bar^2]

    with each side widened by 3 combined standard errors.
    """
    gamma = spec.gamma_true
    vals = _batch_gamma_at_k(spec, k, n, reps, seed)
    var_hat = float(np.var(vals, ddof=1))
    centered = vals - vals.mean()
    m4 = float(np.mean(centered**4))
    se_var = math.sqrt(
        max(m4 - var_hat**2 * (reps - 3) / (reps - 1), 0.0) / reps
    )

    y = simulate_y_order_stat(n, k, reps, seed, method="partial-sum")
    ebar = eta_bar(spec, np.exp(y))
    a_hat = float(ebar.mean())
    se_a = float(ebar.std(ddof=1) / math.sqrt(reps))
    b_hat = float((ebar**2).mean())
    se_b = float((ebar**2).std(ddof=1) / math.sqrt(reps))

    base = gamma**2 / k
    coef_a = 2.0 * gamma / k
    lower = base - coef_a * a_hat
    upper = base + coef_a * a_hat + 5.0 / k * b_hat
    se_lower = math.sqrt(se_var**2 + (coef_a * se_a) ** 2)
    se_upper = math.sqrt(
        se_var**2 + (coef_a * se_a) ** 2 + (5.0 / k * se_b) ** 2
    )
    # eta_bar == 0 collapses both bounds onto gamma^2/k and the check
    # degenerates to |var_hat - gamma^2/k| <= 3 se_var
    slack_lower = (var_hat - lower) / se_lower if se_lower else math.inf
    slack_upper = (upper - var_hat) / se_upper if se_upper else math.inf
    passed = slack_lower >= -3.0 and slack_upper >= -3.0
    return VerifyReport(
        check="variance-bounds",
        params={"spec": spec.to_json(), "k": k, "n": n, "reps": reps},
        measured={
            "var_hat": var_hat,
            "se_var": se_var,
            "mean_eta_bar": a_hat,
            "mean_eta_bar_sq": b_hat,
        },
        bound={"lower": lower, "upper": upper, "base": base},
        margin=float(min(slack_lower, slack_upper)),
        passed=bool(passed),
    )


def check_bias_identity(
    spec: DistributionSpec, k: int, n: int, reps: int, seed: Seed
) -> VerifyReport:
    """E[gamma_hat(k)] - gamma against E[b(e^{Y_(k+1)})] on coupled draws.

    Each replicate builds the sample from its own exponential order
    statistics, so both sides share the same Y_(k+1) and the difference
    has much smaller variance than either side.
    """
    bias_b(spec, 2.0)  # raises UnsupportedFamilyError early
    gamma = spec.gamma_true
    diffs = np.empty(reps)
    done = 0
    chunk_idx = 0
    while done < reps:
        m = min(_CHUNK, reps - done)
        rg = derive_stream(seed, 103, chunk_idx)
        e = np.sort(rg.standard_exponential((m, n)), axis=1)[:, ::-1]
        x = _quantile_transform(spec, e)
        logs = np.log(x[:, : k + 1])
        g_k = logs[:, :k].mean(axis=1) - logs[:, k]
        b_vals = np.array([bias_b(spec, t) for t in np.exp(e[:, k])])
        diffs[done : done + m] = (g_k - gamma) - b_vals
        done += m
        chunk_idx += 1
    mean_d = float(diffs.mean())
    se_d = float(diffs.std(ddof=1) / math.sqrt(reps))
    slack = 3.0 - abs(mean_d) / se_d if se_d else math.inf
    return VerifyReport(
        check="bias-identity",
        params={"spec": spec.to_json(), "k": k, "n": n, "reps": reps},
        measured={"mean_difference": mean_d, "stderr": se_d},
        bound={"tolerance": 3.0 * se_d},
        margin=float(slack),
        passed=bool(abs(mean_d) <= 3.0 * se_d),
    )


def check_gamma_tail(k: int, reps: int, delta: float, seed: Seed) -> VerifyReport:
    """Pure-Pareto concentration: exceedance frequency of the gamma-tail bound.

    The event |gamma_hat(k) - gamma| >= (gamma/sqrt(k)) (sqrt(2 ln(2/delta))
    + ln(2/delta)/sqrt(k)) has probability at most 2 delta.
    """
    spec = pure_pareto(1.0)
    vals = _batch_gamma_at_k(spec, k, 2 * k, reps, seed)
    log_term = math.log(2.0 / delta)
    threshold = (math.sqrt(2.0 * log_term) + log_term / math.sqrt(k)) / math.sqrt(k)
    freq = float(np.mean(np.abs(vals - 1.0) >= threshold))
    bound = 2.0 * delta
    if bound >= 1.0:
        return VerifyReport(
            check="gamma-tail",
            params={"k": k, "reps": reps, "delta": delta},
            measured={"frequency": freq},
            bound={"probability": bound},
            margin=math.inf,
            passed=True,
        )
    se = math.sqrt(bound * (1.0 - bound) / reps)
    slack = (bound + 3.0 * se - freq) / se
    return VerifyReport(
        check="gamma-tail",
        params={"k": k, "reps": reps, "delta": delta},
        measured={"frequency": freq, "stderr": se},
        bound={"probability": bound},
        margin=float(slack),
        passed=bool(freq <= bound + 3.0 * se),
    )


def check_order_stat_tail(
    n: int, k: int, delta: float, reps: int, seed: Seed
) -> VerifyReport:
    """Lower tail of exp(Y_(k+1)): frequency of >= n/k^delta is >= 1 - delta."""
    if not k < n:
        raise ValueError("need k < n")
    y = simulate_y_order_stat(n, k, reps, seed, method="beta")
    log_term = math.log(1.0 / delta)
    k_delta = k + 2.0 * log_term + math.sqrt(2.0 * k * log_term)
    freq = float(np.mean(np.exp(y) >= n / k_delta))
    target = 1.0 - delta
    se = math.sqrt(delta * (1.0 - delta) / reps)
    slack = (freq - (target - 3.0 * se)) / se
    return VerifyReport(
        check="order-stat-tail",
        params={"n": n, "k": k, "delta": delta, "reps": reps},
        measured={"frequency": freq, "stderr": se},
        bound={"probability": target},
        margin=float(slack),
        passed=bool(freq >= target - 3.0 * se),
    )


def check_maxdev_scaling(
    n_list: Sequence[int], reps: int, seed: Seed
) -> VerifyReport:
    """Median of max_{30<=i<=n/10} sqrt(i)|gamma_hat(i)/gamma - 1| vs
    sqrt(2 ln ln n).

    Pure-Pareto traces are simulated from rescaled spacings, the fitted
    through-origin slope of the medians against sqrt(2 ln ln n) should be
    of order one; informational band [0.5, 1.5].
    """
    if reps < 2:
        raise InsufficientRepsError(f"need reps >= 2, got {reps}")
    medians = {}
    for j, n in enumerate(sorted(n_list)):
        m = n // 10
        if m < 30:
            raise ValueError(f"n={n} too small: need n/10 >= 30")
        rg = derive_stream(seed, 104, j)
        i_arr = np.arange(1, m + 1, dtype=float)
        z = np.empty(reps)
        done = 0
        while done < reps:
            c = min(_CHUNK, reps - done)
            e = rg.standard_exponential((c, m))
            dev = np.abs(np.cumsum(e, axis=1) / i_arr - 1.0) * np.sqrt(i_arr)
            z[done : done + c] = dev[:, 29:].max(axis=1)
            done += c
        medians[n] = float(np.median(z))
    x = np.array([math.sqrt(2.0 * math.log(math.log(n))) for n in medians])
    y = np.array(list(medians.values()))
    slope = float(np.dot(x, y) / np.dot(x, x))
    return VerifyReport(
        check="maxdev-scaling",
        params={"n_list": list(medians), "reps": reps},
        measured={"medians": medians, "slope": slope},
        bound={"slope_band": [0.5, 1.5]},
        margin=float(min(slope - 0.5, 1.5 - slope)),
        passed=bool(0.5 <= slope <= 1.5),
    )


# -- adversarial change-point family and its KL arithmetic ---------------------


class KlBound(NamedTuple):
    kl: float
    quadratic_bound: float


def kl_changepoint(gamma: float, gamma_i: float, tau_i: float) -> KlBound:
    """KL divergence of a change-point law from its pure-Pareto center.

    K = tau_i^{-1/gamma} (gamma_i/gamma - 1 - ln(gamma_i/gamma)) together
    with the quadratic bound tau_i^{-1/gamma} (gamma_i/gamma - 1)^2 / 2,
    valid (and checked) when gamma_i > gamma.
    """
    if gamma <= 0 or gamma_i <= 0:
        raise ValueError("indices must be positive")
    if tau_i <= 1:
        raise ValueError("breakpoint must exceed 1")
    ratio = gamma_i / gamma
    weight = tau_i ** (-1.0 / gamma)
    kl = weight * (ratio - 1.0 - math.log(ratio))
    quad = weight * (ratio - 1.0) ** 2 / 2.0
    if gamma_i > gamma and kl > quad + 1e-15:
        raise AssertionError("quadratic bound violated; numerical issue")
    return KlBound(kl=kl, quadratic_bound=quad)


def kl_changepoint_mc(
    gamma: float, gamma_i: float, tau_i: float, reps: int, seed: Seed
) -> tuple:
    """(estimate, stderr) of E[log-likelihood ratio] under the alternative."""
    spec_i = pareto_change_point(gamma=gamma_i, gamma_prime=gamma, tau=tau_i)
    rg = derive_stream(seed, 105)
    e = rg.standard_exponential(reps)
    x = _quantile_transform(spec_i, e)
    llr = np.where(
        x >= tau_i,
        math.log(gamma / gamma_i)
        + (1.0 / gamma - 1.0 / gamma_i) * (np.log(x) - math.log(tau_i)),
        0.0,
    )
    return float(llr.mean()), float(llr.std(ddof=1) / math.sqrt(reps))


@dataclass
class Alternative:
    rho_i: float
    tau_i: float
    gamma_i: float
    kl_i: float
    kl_quad_i: float


@dataclass
class LowerBoundFamily:
    """Local change-point alternatives around a pure Pareto center.

    All alternatives share the KL budget n K(P_i, P_0) <= v ln M and are
    mutually separated by a constant times the adaptive rate.
    """

    gamma0: float
    rho: float
    v: float
    n: int
    M: int
    c_rho: float
    alternatives: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "gamma0": self.gamma0,
            "rho": self.rho,
            "v": self.v,
            "n": self.n,
            "M": self.M,
            "c_rho": self.c_rho,
            "alternatives": [vars(a) for a in self.alternatives],
        }


_V_MAX = math.e / (1.0 + 2.0 * math.e)


def lower_bound_family(
    gamma0: float, rho: float, n: int, v: Optional[float] = None
) -> LowerBoundFamily:
    """Construct the M = floor(ln n) change-point alternatives.

    tau_i = (n/(v ln M))^{gamma/(1+2|rho_i|)},
    gamma_i = gamma (1 + (n/(v ln M))^{rho_i/(1+2|rho_i|)}),
    rho_i = rho + i/M, and verifies the KL budgets and the pairwise
    separation with C_rho = 1 - exp(-1/(2(1+2|rho|)^2)).

    Raises:
        HypothesesNotMetError: naming the violated clause.
    """
    if v is None:
        v = _V_MAX
    if gamma0 <= 0:
        raise HypothesesNotMetError("gamma0", "must be positive")
    if not rho < -1:
        raise HypothesesNotMetError("rho", f"need rho < -1, got {rho}")
    if not 0 < v <= _V_MAX:
        raise HypothesesNotMetError("v", f"need 0 < v <= e/(1+2e), got {v}")
    M = math.floor(math.log(n))
    if not M > math.exp(1.0 / v):
        raise HypothesesNotMetError(
            "M", f"floor(ln n) = {M} must exceed e^(1/v) = {math.exp(1.0 / v):.3f}"
        )
    scale = n / (v * math.log(M))
    log_scale = math.log(scale)
    if not M / 2.0 <= log_scale:
        raise HypothesesNotMetError(
            "bracketing", f"need M/2 <= ln(n/(v ln M)) = {log_scale:.3f}"
        )
    if log_scale > M:
        # the upper bracket is cosmetic for the quantities verified here
        # (the separation floor only uses the lower side and is re-checked
        # pair by pair below); report it instead of failing
        warnings.warn(
            f"ln(n/(v ln M)) = {log_scale:.3f} exceeds M = {M}; "
            "separation is still verified explicitly",
            stacklevel=2,
        )
    c_rho = 1.0 - math.exp(-1.0 / (2.0 * (1.0 + 2.0 * abs(rho)) ** 2))
    alternatives = []
    for i in range(1, M + 1):
        rho_i = rho + i / M
        if not rho_i < 0:
            raise HypothesesNotMetError("rho_i", f"rho_{i} = {rho_i} not negative")
        denom = 1.0 + 2.0 * abs(rho_i)
        tau_i = scale ** (gamma0 / denom)
        gamma_i = gamma0 * (1.0 + scale ** (rho_i / denom))
        kl, quad = kl_changepoint(gamma0, gamma_i, tau_i)
        if n * kl > v * math.log(M) * (1.0 + 1e-12):
            raise HypothesesNotMetError(
                "kl-budget", f"alternative {i} exceeds v ln M"
            )
        alternatives.append(
            Alternative(
                rho_i=rho_i, tau_i=tau_i, gamma_i=gamma_i, kl_i=kl, kl_quad_i=quad
            )
        )
    for i in range(1, M + 1):
        a_i = alternatives[i - 1]
        sep_floor = 0.5 * c_rho * scale ** (a_i.rho_i / (1.0 + 2.0 * abs(a_i.rho_i)))
        for j in range(1, i):
            a_j = alternatives[j - 1]
            gap = abs(a_j.gamma_i - a_i.gamma_i) / a_i.gamma_i
            if gap < sep_floor * (1.0 - 1e-12):
                raise HypothesesNotMetError(
                    "separation", f"pair ({j}, {i}) closer than C_rho/2 rate"
                )
    return LowerBoundFamily(
        gamma0=gamma0,
        rho=rho,
        v=v,
        n=n,
        M=M,
        c_rho=c_rho,
        alternatives=alternatives,
    )


def eta_envelope_margin(fam: LowerBoundFamily, points: int = 100) -> float:
    """Worst slack of |eta_i(t)| <= gamma0 t^{rho_i} over a log grid.

    The alternatives' von Mises functions are steps
    eta_i(t) = (gamma0 - gamma_i) 1{t <= tau_i^{1/gamma0}}; the envelope is
    tight exactly at the breakpoint.  Returns min over alternatives and
    grid points of gamma0 t^{rho_i} - |eta_i(t)| (>= -tolerance means the
    envelope holds).
    """
    worst = math.inf
    for alt in fam.alternatives:
        t_break = alt.tau_i ** (1.0 / fam.gamma0)
        grid = np.geomspace(1.5, t_break, points)
        eta_abs = np.where(grid <= t_break, alt.gamma_i - fam.gamma0, 0.0)
        envelope = fam.gamma0 * grid**alt.rho_i
        worst = min(worst, float(np.min(envelope - eta_abs)))
    return worst
