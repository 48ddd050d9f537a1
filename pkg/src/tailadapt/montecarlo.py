"""Replicated-experiment harness: risk profiles and selector comparisons.

Replicates are embarrassingly parallel: replicate ``r`` of a campaign uses
the stream ``(master_seed, r)`` regardless of worker count or completion
order, and all reductions are computed from arrays ordered by replicate
index, so reports are byte-identical for any ``workers`` setting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Optional

import numpy as np

from tailadapt.distributions import DistributionSpec, sample
from tailadapt.hill import hill_trace
from tailadapt.selection import SelectionConfig, drees_kaufmann, lepski_practical


@dataclass
class RmseProfile:
    """Standardised RMSE of the trace per index over many replicates."""

    spec: DistributionSpec
    n: int
    reps: int
    k_grid: np.ndarray
    rmse: np.ndarray
    stderr: np.ndarray
    master_seed: int = 0

    def __post_init__(self):
        if not (len(self.k_grid) == len(self.rmse) == len(self.stderr)):
            raise ValueError("k_grid, rmse and stderr must align")


@dataclass
class ComparisonRow:
    """Selector-vs-oracle summary for one distribution."""

    name: str
    spec: DistributionSpec
    n: int
    reps: int
    k_star: int
    rmse_star: float
    median_k_lepski: float
    median_k_dk: float
    ratio_k_lepski: float
    ratio_k_dk: float
    ratio_rmse_lepski: float
    ratio_rmse_dk: float
    # diagnostics: per-replicate-ratio medians and mean-square variants
    ratio_rmse_lepski_perrep: float
    ratio_rmse_dk_perrep: float
    ratio_rmse_lepski_mse: float
    ratio_rmse_dk_mse: float
    replicates: Optional[dict] = field(default=None, repr=False)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "spec": self.spec.to_json(),
            "n": self.n,
            "reps": self.reps,
            "k_star": self.k_star,
            "rmse_star": self.rmse_star,
            "median_k_lepski": self.median_k_lepski,
            "median_k_dk": self.median_k_dk,
            "ratio_k_lepski": self.ratio_k_lepski,
            "ratio_k_dk": self.ratio_k_dk,
            "ratio_rmse_lepski": self.ratio_rmse_lepski,
            "ratio_rmse_dk": self.ratio_rmse_dk,
            "ratio_rmse_lepski_perrep": self.ratio_rmse_lepski_perrep,
            "ratio_rmse_dk_perrep": self.ratio_rmse_dk_perrep,
            "ratio_rmse_lepski_mse": self.ratio_rmse_lepski_mse,
            "ratio_rmse_dk_mse": self.ratio_rmse_dk_mse,
        }
        return out


def default_k_grid(n: int) -> np.ndarray:
    """All k in [10, n-1] up to n = 2000, else a 500-point log grid."""
    lo = 10 if n > 12 else 1
    if n <= 2000:
        return np.arange(lo, n, dtype=np.int64)
    grid = np.unique(
        np.round(np.logspace(math.log10(lo), math.log10(n - 1), 500)).astype(
            np.int64
        )
    )
    return grid


def _values_at(gammas: np.ndarray, k_grid: np.ndarray) -> np.ndarray:
    out = np.full(k_grid.size, np.nan)
    mask = k_grid <= gammas.size
    out[mask] = gammas[k_grid[mask] - 1]
    return out


# Worker-pool plumbing: payload is installed once per worker, tasks are
# bare replicate indices.
_PAYLOAD: dict = {}


def _init_worker(payload: dict) -> None:
    _PAYLOAD.clear()
    _PAYLOAD.update(payload)


def _profile_rep(rep: int):
    p = _PAYLOAD
    smp = sample(p["spec"], p["n"], (p["seed"], rep))
    trace = hill_trace(smp)
    return _values_at(trace.gammas, p["k_grid"])


def _compare_rep(rep: int):
    p = _PAYLOAD
    cfg: SelectionConfig = p["config"]
    smp = sample(p["spec"], p["n"], (p["seed"], rep))
    trace = hill_trace(smp)
    res_l = lepski_practical(trace, c=cfg.c, k_min=cfg.k_min)
    res_dk = drees_kaufmann(trace, cfg)
    return (
        res_l.k_hat,
        res_l.gamma_hat,
        res_dk.k_hat,
        res_dk.gamma_hat,
        _values_at(trace.gammas, p["k_grid"]),
    )


def _run_replicates(task_fn, payload: dict, reps: int, workers: int) -> list:
    if workers <= 1:
        _init_worker(payload)
        return [task_fn(r) for r in range(reps)]
    with Pool(workers, initializer=_init_worker, initargs=(payload,)) as pool:
        chunk = max(1, reps // (workers * 4))
        return pool.map(task_fn, range(reps), chunksize=chunk)


def _rmse_columns(values: np.ndarray, gamma: float):
    """Column-wise standardised RMSE and its delta-method standard error.

    Columns with fewer than two finite entries (grid indices beyond a
    replicate's positive part) come back NaN.
    """
    sq = (values / gamma - 1.0) ** 2
    finite = ~np.isnan(sq)
    count = finite.sum(axis=0)
    filled = np.where(finite, sq, 0.0)
    ok = count >= 2
    denom = np.where(ok, count, 1)
    mean_sq = np.where(ok, filled.sum(axis=0) / denom, np.nan)
    centered = np.where(finite, sq - mean_sq, 0.0)
    var_sq = np.where(
        ok, (centered**2).sum(axis=0) / np.maximum(denom - 1, 1), np.nan
    )
    rmse = np.sqrt(mean_sq)
    se_mean = np.sqrt(var_sq / denom)
    stderr = np.where(rmse > 0, se_mean / (2.0 * np.maximum(rmse, 1e-300)), 0.0)
    return rmse, stderr


def _refined_grid(k_grid: np.ndarray, j_min: int, cap: int = 400) -> np.ndarray:
    lo = int(k_grid[max(0, j_min - 1)])
    hi = int(k_grid[min(k_grid.size - 1, j_min + 1)])
    if hi - lo <= 1:
        return np.empty(0, dtype=np.int64)
    fine = np.arange(lo + 1, hi, dtype=np.int64)
    if fine.size > cap:
        fine = np.unique(
            np.round(np.linspace(lo + 1, hi - 1, cap)).astype(np.int64)
        )
    return np.setdiff1d(fine, k_grid)


def rmse_profile(
    spec: DistributionSpec,
    n: int,
    reps: int,
    seed: int,
    k_grid: Optional[np.ndarray] = None,
    workers: int = 1,
    refine: Optional[bool] = None,
) -> RmseProfile:
    """Estimate E[(gamma_hat(k)/gamma - 1)^2]^(1/2) over a grid of k.

    With ``refine`` (default: only when the grid is the coarse log-spaced
    default) a second pass adds every integer index between the coarse
    grid neighbours of the running minimum, reusing the same replicate
    streams.
    """
    if reps < 2:
        raise ValueError("need reps >= 2")
    explicit_grid = k_grid is not None
    grid = (
        np.asarray(k_grid, dtype=np.int64) if explicit_grid else default_k_grid(n)
    )
    if grid.min() < 1 or grid.max() > n - 1:
        raise ValueError("k_grid must lie within [1, n-1]")
    if refine is None:
        refine = not explicit_grid and n > 2000
    values = np.vstack(
        _run_replicates(
            _profile_rep,
            {"spec": spec, "n": n, "seed": seed, "k_grid": grid},
            reps,
            workers,
        )
    )
    rmse, stderr = _rmse_columns(values, spec.gamma_true)
    if refine:
        extra = _refined_grid(grid, int(np.nanargmin(rmse)))
        if extra.size:
            values2 = np.vstack(
                _run_replicates(
                    _profile_rep,
                    {"spec": spec, "n": n, "seed": seed, "k_grid": extra},
                    reps,
                    workers,
                )
            )
            rmse2, stderr2 = _rmse_columns(values2, spec.gamma_true)
            order = np.argsort(np.concatenate([grid, extra]))
            grid = np.concatenate([grid, extra])[order]
            rmse = np.concatenate([rmse, rmse2])[order]
            stderr = np.concatenate([stderr, stderr2])[order]
    return RmseProfile(
        spec=spec,
        n=n,
        reps=reps,
        k_grid=grid,
        rmse=rmse,
        stderr=stderr,
        master_seed=seed,
    )


def oracle_index(profile: RmseProfile) -> tuple:
    """(k_star, rmse_star): grid argmin of the RMSE, ties toward smaller k."""
    if profile.k_grid.size == 0:
        raise ValueError("empty profile")
    j = int(np.nanargmin(profile.rmse))
    return int(profile.k_grid[j]), float(profile.rmse[j])


def compare_selectors(
    name: str,
    spec: DistributionSpec,
    n: int,
    reps: int,
    seed: int,
    config: SelectionConfig = SelectionConfig(),
    k_star: Optional[int] = None,
    workers: int = 1,
    refine: bool = True,
    collect_replicates: bool = False,
) -> ComparisonRow:
    """Run both data-driven selectors against the oracle index.

    Per replicate, applies the practical rule (c from ``config``) and the
    Drees-Kaufmann rule to the same trace, then reports median selected
    indices and the ratio of median absolute standardised errors at the
    selected indices versus at the oracle index ``k_star`` (estimated from
    the same replicates when not supplied).
    """
    gamma = spec.gamma_true
    grid = default_k_grid(n)
    if k_star is not None:
        grid = np.unique(np.concatenate([grid, [np.int64(k_star)]]))
    rows = _run_replicates(
        _compare_rep,
        {"spec": spec, "n": n, "seed": seed, "k_grid": grid, "config": config},
        reps,
        workers,
    )
    k_l = np.array([r[0] for r in rows], dtype=np.int64)
    g_l = np.array([r[1] for r in rows])
    k_dk = np.array([r[2] for r in rows], dtype=np.int64)
    g_dk = np.array([r[3] for r in rows])
    values = np.vstack([r[4] for r in rows])

    rmse, _ = _rmse_columns(values, gamma)
    if k_star is None:
        j_star = int(np.nanargmin(rmse))
        if refine:
            extra = _refined_grid(grid, j_star)
            if extra.size:
                values2 = np.vstack(
                    _run_replicates(
                        _profile_rep,
                        {"spec": spec, "n": n, "seed": seed, "k_grid": extra},
                        reps,
                        workers,
                    )
                )
                rmse2, _ = _rmse_columns(values2, gamma)
                order = np.argsort(np.concatenate([grid, extra]))
                grid = np.concatenate([grid, extra])[order]
                rmse = np.concatenate([rmse, rmse2])[order]
                values = np.hstack([values, values2])[:, order]
        j_star = int(np.nanargmin(rmse))
    else:
        j_star = int(np.searchsorted(grid, k_star))
    k_star_val = int(grid[j_star])
    rmse_star = float(rmse[j_star])

    err_l = np.abs(g_l / gamma - 1.0)
    err_dk = np.abs(g_dk / gamma - 1.0)
    err_star = np.abs(values[:, j_star] / gamma - 1.0)
    med_star = float(np.nanmedian(err_star))

    def _ratios(err):
        ratio_of_medians = float(np.nanmedian(err)) / med_star
        with np.errstate(divide="ignore", invalid="ignore"):
            perrep = float(np.nanmedian(err / err_star))
        mse = float(
            math.sqrt(np.nanmean(err**2)) / math.sqrt(np.nanmean(err_star**2))
        )
        return ratio_of_medians, perrep, mse

    rml, rpl, rsl = _ratios(err_l)
    rmd, rpd, rsd = _ratios(err_dk)
    replicates = None
    if collect_replicates:
        replicates = {
            "k_lepski": k_l,
            "k_dk": k_dk,
            "err_lepski": err_l,
            "err_dk": err_dk,
            "err_star": err_star,
        }
    return ComparisonRow(
        name=name,
        spec=spec,
        n=n,
        reps=reps,
        k_star=k_star_val,
        rmse_star=rmse_star,
        median_k_lepski=float(np.median(k_l)),
        median_k_dk=float(np.median(k_dk)),
        ratio_k_lepski=float(np.median(k_l)) / k_star_val,
        ratio_k_dk=float(np.median(k_dk)) / k_star_val,
        ratio_rmse_lepski=rml,
        ratio_rmse_dk=rmd,
        ratio_rmse_lepski_perrep=rpl,
        ratio_rmse_dk_perrep=rpd,
        ratio_rmse_lepski_mse=rsl,
        ratio_rmse_dk_mse=rsd,
        replicates=replicates,
    )
