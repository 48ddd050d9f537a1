"""The four figure kinds.

Each renderer takes parsed column data and returns a matplotlib Figure;
writing happens in the CLI so that no file is touched unless rendering
succeeded.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from tailplots.io import SchemaError


def ribbon_bounds(k: np.ndarray, gamma: np.ndarray, r: float) -> tuple:
    """Eligibility ribbon around a trace: gamma_hat(i) +- r gamma_hat(i)/sqrt(i).

    The full width at index i is exactly 2 r gamma_hat(i) / sqrt(i).
    """
    half = r * gamma / np.sqrt(k)
    return gamma - half, gamma + half


def risk_profile(data: dict, label: str = "") -> plt.Figure:
    """RMSE-vs-k curve on log axes, with a shaded 2-stderr band if present."""
    k = np.asarray(data["k"])
    rmse = np.asarray(data["rmse"])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(k, rmse, lw=1.5, label=label or None)
    if "stderr" in data:
        se = np.asarray(data["stderr"])
        ax.fill_between(k, rmse - 2 * se, rmse + 2 * se, alpha=0.25, lw=0)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("number of upper order statistics k")
    ax.set_ylabel("standardised RMSE")
    if label:
        ax.legend(frameon=False)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return fig


def risk_comparison(datasets: dict) -> plt.Figure:
    """Several RMSE curves overlaid, one per input file."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, data in datasets.items():
        ax.plot(np.asarray(data["k"]), np.asarray(data["rmse"]), lw=1.3, label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("number of upper order statistics k")
    ax.set_ylabel("standardised RMSE")
    ax.legend(frameon=False)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return fig


def alt_hill_ribbon(
    data: dict,
    result: dict | None = None,
    oracle_k: int | None = None,
    log_index: bool = True,
) -> plt.Figure:
    """Trace with the selection rule's eligibility ribbon.

    The ribbon half-width at index i is ``r gamma_hat(i)/sqrt(i)`` with r
    taken from the result document (falls back to 1.0 when absent); the
    selected index is marked with a triangle, the oracle index, when
    given, with a cross.
    """
    k = np.asarray(data["k"])
    gamma = np.asarray(data["gamma_hat"])
    r = float(result["r_used"]) if result else 1.0
    lower, upper = ribbon_bounds(k, gamma, r)
    width = upper - lower
    expected = 2.0 * r * gamma / np.sqrt(k)
    if not np.allclose(width, expected, rtol=0, atol=1e-9 * np.max(expected)):
        raise AssertionError("ribbon width disagrees with 2 r gamma_hat(i)/sqrt(i)")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.fill_between(k, lower, upper, color="0.8", lw=0)
    ax.plot(k, gamma, color="C0", lw=1.2)
    if result is not None:
        k_hat = int(result["k_hat"])
        ax.plot(
            [k_hat],
            [result["gamma_hat"]],
            marker="^",
            color="C3",
            ms=9,
            ls="none",
            label=f"selected k = {k_hat}",
        )
    if oracle_k is not None:
        j = int(np.argmin(np.abs(k - oracle_k)))
        ax.plot(
            [k[j]],
            [gamma[j]],
            marker="x",
            color="k",
            ms=9,
            ls="none",
            label=f"oracle k = {oracle_k}",
        )
    if log_index:
        ax.set_xscale("log")
    ax.set_xlabel("number of upper order statistics k")
    ax.set_ylabel("index estimate")
    lo, hi = np.quantile(gamma, [0.01, 0.99])
    span = max(hi - lo, 0.1)
    ax.set_ylim(lo - 1.5 * span, hi + 1.5 * span)
    if result is not None or oracle_k is not None:
        ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def selection_density(
    points: dict, profile: dict | None = None, rule: str | None = None
) -> plt.Figure:
    """Density of per-replicate (selected index, absolute standardised error).

    Optionally overlays the RMSE-vs-k curve of the same distribution and
    restricts to a single rule when the replicate file holds several.
    """
    k_hat = np.asarray(points["k_hat"], dtype=float)
    err = np.asarray(points["abs_std_err"], dtype=float)
    if rule is not None:
        mask = np.asarray([x == rule for x in points["rule"]])
        if not mask.any():
            raise SchemaError(f"no replicates for rule {rule!r}")
        k_hat, err = k_hat[mask], err[mask]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    hb = ax.hexbin(
        k_hat,
        np.maximum(err, 1e-6),
        gridsize=35,
        xscale="log",
        yscale="log",
        mincnt=1,
        cmap="viridis",
    )
    fig.colorbar(hb, ax=ax, label="replicates")
    if profile is not None:
        ax.plot(
            np.asarray(profile["k"]),
            np.asarray(profile["rmse"]),
            color="C3",
            lw=1.5,
            label="standardised RMSE",
        )
        ax.legend(frameon=False)
    ax.set_xlabel("selected index")
    ax.set_ylabel("absolute standardised error")
    fig.tight_layout()
    return fig
