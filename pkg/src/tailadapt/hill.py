"""Hill estimator traces and their exponential-spacings representation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from tailadapt.distributions import SortedSample
from tailadapt.errors import InsufficientPositiveDataError
from tailadapt.rng import Seed, derive_stream


@dataclass(frozen=True)
class HillTrace:
    """Sequence of Hill estimates gamma_hat(k), k = 1..len(gammas).

    ``n`` is the number of order statistics the trace was computed from
    (the positive part of the sample).  A full trace has length n - 1;
    simulated traces may be truncated at some k_max < n - 1.
    """

    gammas: np.ndarray
    n: int

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 1 or g.size < 1:
            raise ValueError("gammas must be a nonempty 1-d array")
        if g.size > self.n - 1:
            raise ValueError("trace longer than n - 1")
        object.__setattr__(self, "gammas", g)

    @property
    def k_max(self) -> int:
        return int(self.gammas.size)

    def at(self, k: int) -> float:
        """gamma_hat(k) for 1 <= k <= k_max."""
        if not 1 <= k <= self.k_max:
            raise IndexError(f"k={k} outside trace range 1..{self.k_max}")
        return float(self.gammas[k - 1])


def hill_trace(sample: SortedSample) -> HillTrace:
    """Hill estimates for all k from a sorted sample.

    Restricts to the strictly positive order statistics and evaluates
    gamma_hat(k) = (1/k) sum_{i<=k} ln(X_(i)/X_(k+1)) for every k in one
    cumulative-sum pass.
    """
    pos = sample.positive_values()
    if pos.size < 2:
        raise InsufficientPositiveDataError(
            f"need at least 2 positive values, got {pos.size}"
        )
    logs = np.log(pos)
    k = np.arange(1, pos.size)
    gammas = np.cumsum(logs[:-1]) / k - logs[1:]
    return HillTrace(gammas=gammas, n=int(pos.size))


def hill_trace_direct(sample: SortedSample) -> HillTrace:
    """Quadratic-time evaluation straight from the definition (oracle)."""
    pos = sample.positive_values()
    if pos.size < 2:
        raise InsufficientPositiveDataError(
            f"need at least 2 positive values, got {pos.size}"
        )
    logs = np.log(pos)
    gammas = np.empty(pos.size - 1)
    for k in range(1, pos.size):
        gammas[k - 1] = np.mean(logs[:k] - logs[k])
    return HillTrace(gammas=gammas, n=int(pos.size))


def hill_from_representation(
    gamma: float,
    eta: Callable,
    n: int,
    k_max: int,
    seed: Seed,
    eta_integral: Optional[Callable] = None,
) -> HillTrace:
    """Simulate a Hill trace through its exponential representation.

    Builds exponential order statistics Y_(i) = sum_{j>=i} E_j/j and
    returns, for k <= k_max,

        gamma_hat(k) = (1/k) sum_{i<=k} (gamma E_i + i I_i),
        I_i = int_{Y_(i+1)}^{Y_(i)} eta(e^v) dv.

    Equal in law to the trace of a direct sample whose von Mises function
    is ``eta``.

    Args:
        gamma: extreme value index.
        eta: von Mises function on (1, inf); used pointwise when no exact
            segment integral is supplied.
        n: virtual sample size (sets the law of the Y's).
        k_max: last index to simulate; must be < n.
        seed: stream seed.
        eta_integral: optional exact (a, b) -> int_a^b eta(e^v) dv; when
            omitted the segments are integrated by adaptive quadrature
            with tolerance 1e-9 and a hard subdivision cap.
    """
    if not 1 <= k_max < n:
        raise ValueError("need 1 <= k_max < n")
    rg = derive_stream(seed)
    e = rg.standard_exponential(n)
    weights = e / np.arange(1, n + 1)
    # y[i] = Y_(i+1) in 0-based terms; appended 0 is Y_(n+1)
    y = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])
    lo = y[1 : k_max + 1]
    hi = y[:k_max]
    if eta_integral is not None:
        seg = np.asarray(eta_integral(lo, hi), dtype=float)
    else:
        seg = np.array(
            [
                integrate.quad(
                    lambda v: eta(np.exp(v)) if v > 0 else 0.0,
                    a,
                    b,
                    epsabs=1e-9,
                    epsrel=1e-9,
                    limit=10_000,
                )[0]
                for a, b in zip(lo, hi)
            ]
        )
    i_arr = np.arange(1, k_max + 1)
    contrib = gamma * e[:k_max] + i_arr * seg
    gammas = np.cumsum(contrib) / i_arr
    return HillTrace(gammas=gammas, n=n)
