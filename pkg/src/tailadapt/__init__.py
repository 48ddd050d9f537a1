"""Adaptive Hill estimation toolkit.

Estimation of the extreme value index of heavy-tailed data: Hill traces,
adaptive index-selection rules (Lepski-type and Drees-Kaufmann), exact
samplers for a benchmark suite of heavy-tailed distributions, a replicated
Monte-Carlo harness and an empirical verification suite for the
finite-sample guarantees the selection rules rely on.
"""

from tailadapt.distributions import (
    DistributionSpec,
    Family,
    SortedSample,
    bias_b,
    eta_bar,
    sample,
    tail_quantile,
    von_mises_eta,
)
from tailadapt.hill import HillTrace, hill_from_representation, hill_trace
from tailadapt.montecarlo import (
    RmseProfile,
    compare_selectors,
    oracle_index,
    rmse_profile,
)
from tailadapt.selection import (
    Rule,
    SelectionConfig,
    SelectionResult,
    drees_kaufmann,
    lepski_practical,
    lepski_theoretical,
    pivotal_k_n,
)

__version__ = "0.1.0"

__all__ = [
    "DistributionSpec",
    "Family",
    "SortedSample",
    "HillTrace",
    "Rule",
    "SelectionConfig",
    "SelectionResult",
    "RmseProfile",
    "tail_quantile",
    "sample",
    "von_mises_eta",
    "eta_bar",
    "bias_b",
    "hill_trace",
    "hill_from_representation",
    "lepski_practical",
    "lepski_theoretical",
    "drees_kaufmann",
    "pivotal_k_n",
    "rmse_profile",
    "oracle_index",
    "compare_selectors",
    "__version__",
]
