"""Adaptive index-selection rules for Hill traces.

Three data-driven rules are provided:

* ``lepski_practical`` - the almost parameter-free rule: pick the last
  index before any estimate leaves the fluctuation band
  ``r gamma_hat(i)/sqrt(i)`` of an earlier estimate, with
  ``r = sqrt(c ln ln n)`` and ``c = 2.1`` by default.
* ``lepski_theoretical`` - the same comparison scheme run with the fully
  explicit constants of the finite-sample analysis (conservative; exposed
  mainly for the verification harness).
* ``drees_kaufmann`` - the classical second-order-calibrated competitor
  built from two stopped indices at thresholds ``2 n^{1/4}`` and its
  0.7-th power.

All rules are scale invariant: thresholds are relative to the trace.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from tailadapt.errors import NoPivotalIndexError, SampleTooSmallError
from tailadapt.hill import HillTrace


class Rule(str, Enum):
    LEPSKI_PRACTICAL = "lepski"
    LEPSKI_THEORETICAL = "lepski-theoretical"
    DREES_KAUFMANN = "dk"


@dataclass(frozen=True)
class SelectionConfig:
    """Constants for the selection rules.

    ``c``/``k_min`` drive the practical rule; ``delta``, ``c1``, ``c1_prime``,
    ``c2`` and ``c3`` parameterise the theoretical rule (defaults sit at the
    admissible upper bounds); ``zeta`` and ``rho_hat_abs`` belong to the
    Drees-Kaufmann rule.  ``compare_all_indices`` switches the theoretical
    rule to comparing each k against every index, not only i <= k.
    """

    rule: Rule = Rule.LEPSKI_PRACTICAL
    c: float = 2.1
    k_min: int = 30
    delta: float = 0.1
    c1: float = 4.0
    c1_prime: float = 34.0
    c2: float = 100.0
    c3: float = 2.0
    zeta: float = 0.7
    rho_hat_abs: float = 1.0
    compare_all_indices: bool = False

    def __post_init__(self):
        for name in ("c", "c1", "c1_prime", "c2", "c3", "zeta", "rho_hat_abs"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.zeta < 1:
            raise ValueError("zeta must lie in (0, 1)")
        if self.k_min < 2:
            raise ValueError("k_min must be at least 2")


@dataclass(frozen=True)
class SelectionResult:
    """Selected index with its estimate and rule diagnostics."""

    k_hat: int
    gamma_hat: float
    rule: Rule
    r_used: float
    witness: Optional[Tuple[int, int]] = None

    def to_json(self) -> dict:
        return {
            "rule": self.rule.value,
            "k_hat": self.k_hat,
            "gamma_hat": self.gamma_hat,
            "r_used": self.r_used,
            "witness": list(self.witness) if self.witness else None,
        }


def practical_threshold(n: int, c: float) -> float:
    """r = sqrt(c ln ln n) for the practical rule."""
    if n < 55:
        raise SampleTooSmallError(f"need n >= 55, got {n}")
    return math.sqrt(c * math.log(math.log(n)))


def theoretical_constants(n: int, cfg: SelectionConfig) -> dict:
    """All derived constants of the theoretical rule for sample size n."""
    ell = math.ceil(cfg.c2 * math.log(n))
    if ell >= n:
        raise SampleTooSmallError(
            f"comparison floor ceil(c2 ln n) = {ell} >= n = {n}"
        )
    if not 2.0 / n < cfg.delta < 0.25:
        raise ValueError(f"delta must lie in (2/n, 1/4), got {cfg.delta}")
    r_n = math.sqrt(cfg.c3 * math.log(math.log(n)))
    xi_n = cfg.c1 * math.sqrt(math.log(math.log2(n))) + cfg.c1_prime
    log_term = math.log(2.0 / cfg.delta)
    z_bar = (1.0 + 3.0 * r_n / math.sqrt(ell)) * (
        xi_n + math.sqrt(8.0 * log_term) + log_term / math.sqrt(ell)
    )
    return {
        "ell_n": ell,
        "r_n": r_n,
        "xi_n": xi_n,
        "z_bar_delta": z_bar,
        "r_n_delta": 10.0 * (r_n + z_bar),
    }


def _band_bounds(gammas: np.ndarray, r: float, lo_idx: int) -> tuple:
    """Running min/max of the eligibility band over i = lo_idx..k.

    Index i is 1-based; arrays are over k = lo_idx..len(gammas)."""
    i = np.arange(lo_idx, gammas.size + 1, dtype=float)
    g = gammas[lo_idx - 1 :]
    half = r * g / np.sqrt(i)
    upper = np.minimum.accumulate(g + half)
    lower = np.maximum.accumulate(g - half)
    return lower, upper


def lepski_practical(
    trace: HillTrace,
    c: float = 2.1,
    k_min: int = 30,
    r: Optional[float] = None,
) -> SelectionResult:
    """First-violation stopping rule with relative fluctuation bands.

    Scans k upward from ``k_min`` and returns k - 1 for the first k at
    which some i in {k_min..k} satisfies
    ``|gamma_hat(i) - gamma_hat(k)| > r gamma_hat(i)/sqrt(i)``; if no index
    violates, returns the last index of the trace.  The threshold is
    ``r = sqrt(c ln ln n)`` unless an explicit ``r`` is passed.

    The result's ``witness`` holds the (i, k) pair of the first violating
    comparison, and ``k_hat`` is clamped to ``[k_min, len(trace)]``.
    """
    n = trace.n
    r_used = practical_threshold(n, c) if r is None else float(r)
    gammas = trace.gammas
    last = gammas.size
    if k_min >= last:
        raise SampleTooSmallError(f"k_min={k_min} beyond trace length {last}")
    lower, upper = _band_bounds(gammas, r_used, k_min)
    g = gammas[k_min - 1 :]
    violated = (g > upper) | (g < lower)
    if not violated.any():
        k_hat = last
        witness = None
    else:
        k_viol = k_min + int(np.argmax(violated))
        witness = (_first_violating_i(gammas, r_used, k_min, k_viol), k_viol)
        k_hat = max(k_min, k_viol - 1)
    return SelectionResult(
        k_hat=k_hat,
        gamma_hat=float(gammas[k_hat - 1]),
        rule=Rule.LEPSKI_PRACTICAL,
        r_used=r_used,
        witness=witness,
    )


def _first_violating_i(gammas: np.ndarray, r: float, k_min: int, k: int) -> int:
    g_k = gammas[k - 1]
    i = np.arange(k_min, k + 1, dtype=float)
    g_i = gammas[k_min - 1 : k]
    bad = np.abs(g_i - g_k) > r * g_i / np.sqrt(i)
    return k_min + int(np.argmax(bad))


def lepski_theoretical(trace: HillTrace, cfg: SelectionConfig) -> SelectionResult:
    """Largest index eligible under the explicit-constant bands.

    Returns the largest k in {ell_n..len(trace)} such that
    ``|gamma_hat(i) - gamma_hat(k)| <= gamma_hat(i) r_n(delta)/sqrt(i)``
    for every compared i (i <= k by default).
    """
    n = trace.n
    consts = theoretical_constants(n, cfg)
    ell = consts["ell_n"]
    r_delta = consts["r_n_delta"]
    gammas = trace.gammas
    last = gammas.size
    if ell >= last:
        raise SampleTooSmallError(
            f"comparison floor ell_n={ell} beyond trace length {last}"
        )
    if ell >= last // 2:
        warnings.warn(
            f"ell_n={ell} is large relative to the trace ({last}); "
            "consider a smaller c2",
            stacklevel=2,
        )
    lower, upper = _band_bounds(gammas, r_delta, ell)
    if cfg.compare_all_indices:
        lower = np.full_like(lower, lower[-1])
        upper = np.full_like(upper, upper[-1])
    g = gammas[ell - 1 :]
    eligible = (g >= lower) & (g <= upper)
    idx = np.nonzero(eligible)[0]
    k_hat = ell + int(idx[-1]) if idx.size else ell
    return SelectionResult(
        k_hat=k_hat,
        gamma_hat=float(gammas[k_hat - 1]),
        rule=Rule.LEPSKI_THEORETICAL,
        r_used=r_delta,
        witness=None,
    )


def drees_kaufmann(
    trace: HillTrace, cfg: SelectionConfig = SelectionConfig()
) -> SelectionResult:
    """Second-order-calibrated index built from two stopped indices.

    Runs the first-violation rule at raw thresholds ``r_n = 2 n^{1/4}``
    and ``r_n^zeta``, combines them with the plug-in prefactor
    ``(2|rho|+1)^{-1/|rho|} (2|rho| gamma_prelim)^{1/(1+2|rho|)}`` where
    ``gamma_prelim = gamma_hat(floor(sqrt(n)))``, rounds half-to-even and
    clamps to ``[k_min, len(trace)]``.
    """
    n = trace.n
    if n < 55:
        raise SampleTooSmallError(f"need n >= 55, got {n}")
    k_prelim = int(math.isqrt(n))
    if k_prelim > trace.k_max:
        raise SampleTooSmallError("trace too short for preliminary estimate")
    gamma_prelim = max(trace.at(k_prelim), 0.0)
    r_n = 2.0 * n**0.25
    k_slow = lepski_practical(trace, k_min=cfg.k_min, r=r_n).k_hat
    k_fast = lepski_practical(trace, k_min=cfg.k_min, r=r_n**cfg.zeta).k_hat
    rho = cfg.rho_hat_abs
    prefactor = (2.0 * rho + 1.0) ** (-1.0 / rho) * (2.0 * rho * gamma_prelim) ** (
        1.0 / (1.0 + 2.0 * rho)
    )
    raw = prefactor * (k_fast / k_slow**cfg.zeta) ** (1.0 / (1.0 - cfg.zeta))
    k_hat = int(np.clip(round(raw), cfg.k_min, trace.k_max))
    return SelectionResult(
        k_hat=k_hat,
        gamma_hat=trace.at(k_hat),
        rule=Rule.DREES_KAUFMANN,
        r_used=r_n,
        witness=None,
    )


def select(trace: HillTrace, cfg: SelectionConfig) -> SelectionResult:
    """Dispatch on cfg.rule."""
    if cfg.rule is Rule.LEPSKI_PRACTICAL:
        return lepski_practical(trace, c=cfg.c, k_min=cfg.k_min)
    if cfg.rule is Rule.LEPSKI_THEORETICAL:
        return lepski_theoretical(trace, cfg)
    return drees_kaufmann(trace, cfg)


def pivotal_k_n(
    eta_bar_fn: Callable,
    gamma: float,
    n: int,
    r_n: float,
    delta: float,
    ell_n: int = 1,
) -> int:
    """Largest k with sqrt(k) eta_bar(n / k^delta) <= gamma r_n.

    ``k^delta = k + sqrt(2 k ln(1/delta)) + 2 ln(1/delta)`` is the
    high-probability level of the (k+1)-th exponential order statistic;
    arguments below 1 are clamped to 1.  ``eta_bar_fn`` must be
    non-increasing and accept numpy arrays.
    """
    if not 1 <= ell_n <= n:
        raise ValueError("need 1 <= ell_n <= n")
    ks = np.arange(ell_n, n + 1, dtype=float)
    log_term = math.log(1.0 / delta)
    k_delta = ks + np.sqrt(2.0 * ks * log_term) + 2.0 * log_term
    args = np.maximum(n / k_delta, 1.0)
    lhs = np.sqrt(ks) * np.asarray(eta_bar_fn(args), dtype=float)
    ok = np.nonzero(lhs <= gamma * r_n)[0]
    if ok.size == 0:
        raise NoPivotalIndexError(
            "no index satisfies the bias-fluctuation inequality"
        )
    return int(ell_n + ok[-1])
