"""Figure rendering for tail-index experiment outputs.

Reads the estimator CLI's documented CSV/JSON files and renders four
figure kinds: RMSE-vs-k risk profiles, alt-Hill plots with the selection
rule's eligibility ribbon, multi-distribution risk comparisons, and
selection-vs-risk density plots.
"""

__version__ = "0.1.0"
