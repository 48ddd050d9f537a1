"""Command-line front end.

Subcommands: ``estimate`` (data-driven index selection on a file of
observations), ``profile`` (RMSE-vs-k curve for a benchmark law),
``compare`` (selector-vs-oracle campaign, optionally the full benchmark
suite), ``verify`` (empirical checks) and ``lowerbound`` (adversarial
family arithmetic).

Exit codes: 0 ok, 2 input parse error, 3 insufficient data, 4 bad
configuration.  Every output file embeds {version, config, seed}
metadata; outputs are byte-identical for a fixed seed regardless of
``--workers``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from tailadapt import __version__
from tailadapt.distributions import (
    TABLE_ROWS,
    SortedSample,
    spec_by_name,
)
from tailadapt.errors import (
    HypothesesNotMetError,
    InsufficientPositiveDataError,
    SampleTooSmallError,
)
from tailadapt.hill import hill_trace
from tailadapt.montecarlo import compare_selectors, rmse_profile
from tailadapt.selection import (
    Rule,
    SelectionConfig,
    drees_kaufmann,
    lepski_practical,
    lepski_theoretical,
)
from tailadapt.verify import (
    check_bias_identity,
    check_gamma_tail,
    check_maxdev_scaling,
    check_order_stat_tail,
    check_variance_bounds,
    eta_envelope_margin,
    lower_bound_family,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DATA = 3
EXIT_CONFIG = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _float_str(x) -> str:
    return f"{x:.12g}"


def _write_csv(path: Path, header: Sequence[str], rows, meta: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# version={__version__}\n")
        fh.write(f"# seed={meta.get('seed')}\n")
        fh.write(f"# config={json.dumps(meta.get('config', {}), sort_keys=True)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    _float_str(v) if isinstance(v, float) else str(v) for v in row
                )
                + "\n"
            )


def _write_json(path: Path, payload: dict, meta: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "version": __version__,
        "seed": meta.get("seed"),
        "config": meta.get("config", {}),
        **payload,
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_values(path: str) -> np.ndarray:
    values = []
    try:
        fh = open(path)
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot open {path}: {exc}")
    with fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                val = float(text)
            except ValueError:
                raise CliError(
                    EXIT_PARSE, f"{path}: line {lineno}: not a number: {text!r}"
                )
            if not np.isfinite(val):
                raise CliError(
                    EXIT_PARSE, f"{path}: line {lineno}: non-finite value"
                )
            values.append(val)
    return np.asarray(values)


def _selection_config(args) -> SelectionConfig:
    return SelectionConfig(
        rule=Rule(args.rule) if getattr(args, "rule", None) else Rule.LEPSKI_PRACTICAL,
        c=args.c,
        k_min=args.k_min,
        delta=args.delta,
    )


def _cmd_estimate(args) -> int:
    data = _read_values(args.input)
    if data.size < 55:
        raise CliError(EXIT_DATA, f"need at least 55 values, got {data.size}")
    if np.sum(data > 0) < 31:
        raise CliError(
            EXIT_DATA, f"need at least 31 positive values, got {int(np.sum(data > 0))}"
        )
    sample = SortedSample.from_draws(data)
    try:
        trace = hill_trace(sample)
        cfg = _selection_config(args)
        if cfg.rule is Rule.LEPSKI_PRACTICAL:
            result = lepski_practical(trace, c=cfg.c, k_min=cfg.k_min)
        elif cfg.rule is Rule.LEPSKI_THEORETICAL:
            result = lepski_theoretical(trace, cfg)
        else:
            result = drees_kaufmann(trace, cfg)
    except (SampleTooSmallError, InsufficientPositiveDataError) as exc:
        raise CliError(EXIT_DATA, str(exc))
    meta = {"seed": None, "config": _public_config(args)}
    payload = {"result": result.to_json(), "n_positive": trace.n}
    if args.out:
        _write_json(Path(args.out), payload, meta)
    else:
        print(json.dumps(payload["result"], sort_keys=True))
    if args.trace_csv:
        rows = zip(
            range(1, trace.k_max + 1), (float(g) for g in trace.gammas)
        )
        _write_csv(Path(args.trace_csv), ["k", "gamma_hat"], rows, meta)
    return EXIT_OK


def _resolve_specs(args) -> dict:
    if getattr(args, "paper_tables", False):
        return dict(TABLE_ROWS)
    names = []
    for chunk in args.dist or []:
        names.extend(x for x in chunk.split(",") if x)
    if not names:
        raise CliError(EXIT_CONFIG, "no distribution given (use --dist or --paper-tables)")
    out = {}
    for name in names:
        try:
            out[name] = spec_by_name(name)
        except KeyError as exc:
            raise CliError(EXIT_CONFIG, str(exc))
    return out


def _cmd_profile(args) -> int:
    specs = _resolve_specs(args)
    if len(specs) != 1:
        raise CliError(EXIT_CONFIG, "profile expects exactly one --dist")
    [(name, spec)] = specs.items()
    k_grid = None
    if args.k_grid:
        k_grid = np.array(sorted({int(x) for x in args.k_grid.split(",")}))
    profile = rmse_profile(
        spec,
        n=args.n,
        reps=args.reps,
        seed=args.seed,
        k_grid=k_grid,
        workers=args.workers,
    )
    meta = {"seed": args.seed, "config": _public_config(args)}
    rows = zip(
        (int(k) for k in profile.k_grid),
        (float(r) for r in profile.rmse),
        (float(s) for s in profile.stderr),
    )
    out = Path(args.out or f"profile_{name}.csv")
    _write_csv(out, ["k", "rmse", "stderr"], rows, meta)
    return EXIT_OK


_REPORT_COLUMNS = [
    "name",
    "gamma",
    "n",
    "reps",
    "k_star",
    "rmse_star",
    "median_k_lepski",
    "median_k_dk",
    "ratio_k_lepski",
    "ratio_k_dk",
    "ratio_rmse_lepski",
    "ratio_rmse_dk",
    "ratio_rmse_lepski_perrep",
    "ratio_rmse_dk_perrep",
    "ratio_rmse_lepski_mse",
    "ratio_rmse_dk_mse",
]


def _cmd_compare(args) -> int:
    specs = _resolve_specs(args)
    cfg = SelectionConfig(c=args.c, k_min=args.k_min, delta=args.delta)
    rows = []
    json_rows = {}
    replicate_rows = []
    for name, spec in specs.items():
        row = compare_selectors(
            name,
            spec,
            n=args.n,
            reps=args.reps,
            seed=args.seed,
            config=cfg,
            workers=args.workers,
            collect_replicates=bool(args.replicates_out),
        )
        rows.append(
            [
                name,
                float(spec.gamma_true),
                args.n,
                args.reps,
                row.k_star,
                row.rmse_star,
                row.median_k_lepski,
                row.median_k_dk,
                row.ratio_k_lepski,
                row.ratio_k_dk,
                row.ratio_rmse_lepski,
                row.ratio_rmse_dk,
                row.ratio_rmse_lepski_perrep,
                row.ratio_rmse_dk_perrep,
                row.ratio_rmse_lepski_mse,
                row.ratio_rmse_dk_mse,
            ]
        )
        json_rows[name] = row.to_json()
        if args.replicates_out:
            rep = row.replicates
            for r in range(args.reps):
                replicate_rows.append(
                    [
                        name,
                        r,
                        "lepski",
                        int(rep["k_lepski"][r]),
                        float(rep["err_lepski"][r]),
                    ]
                )
                replicate_rows.append(
                    [name, r, "dk", int(rep["k_dk"][r]), float(rep["err_dk"][r])]
                )
    meta = {"seed": args.seed, "config": _public_config(args)}
    out = Path(args.out or "compare.csv")
    _write_csv(out, _REPORT_COLUMNS, rows, meta)
    _write_json(out.with_suffix(".json"), {"rows": json_rows}, meta)
    if args.replicates_out:
        _write_csv(
            Path(args.replicates_out),
            ["name", "rep", "rule", "k_hat", "abs_std_err"],
            replicate_rows,
            meta,
        )
    return EXIT_OK


def _cmd_verify(args) -> int:
    seed = args.seed
    if args.check == "variance":
        spec = spec_by_name(args.dist)
        report = check_variance_bounds(spec, args.k, args.n, args.reps, seed)
    elif args.check == "bias":
        spec = spec_by_name(args.dist)
        report = check_bias_identity(spec, args.k, args.n, args.reps, seed)
    elif args.check == "gamma-tail":
        report = check_gamma_tail(args.k, args.reps, args.delta, seed)
    elif args.check == "order-stat-tail":
        report = check_order_stat_tail(args.n, args.k, args.delta, args.reps, seed)
    elif args.check == "maxdev":
        n_list = [int(x) for x in args.n_list.split(",")]
        report = check_maxdev_scaling(n_list, args.reps, seed)
    else:
        raise CliError(EXIT_CONFIG, f"unknown check {args.check!r}")
    meta = {"seed": seed, "config": _public_config(args)}
    if args.out:
        _write_json(Path(args.out), report.to_json(), meta)
    else:
        print(json.dumps(report.to_json(), sort_keys=True))
    return EXIT_OK


def _cmd_lowerbound(args) -> int:
    try:
        fam = lower_bound_family(args.gamma0, args.rho, args.n, args.v)
    except HypothesesNotMetError as exc:
        raise CliError(EXIT_CONFIG, str(exc))
    payload = fam.to_json()
    payload["eta_envelope_margin"] = eta_envelope_margin(fam)
    meta = {"seed": None, "config": _public_config(args)}
    if args.out:
        _write_json(Path(args.out), payload, meta)
    else:
        print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def _public_config(args) -> dict:
    # machine-specific paths and worker counts do not affect results and
    # are kept out of the embedded config so identical campaigns are
    # byte-identical
    skip = {"func", "config", "out", "workers", "trace_csv", "replicates_out", "input"}
    return {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailadapt",
        description="Adaptive tail-index estimation and benchmarks",
    )
    parser.add_argument(
        "--config",
        help="JSON file with default values for any long flag of the subcommand",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seeded=True):
        p.add_argument("--n", type=int, default=10_000)
        p.add_argument("--reps", type=int, default=1000)
        if seeded:
            p.add_argument("--seed", type=int, default=1)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", help="output path")

    est = sub.add_parser("estimate", help="select k and estimate the index from a file")
    est.add_argument("--input", required=True, help="newline-delimited reals")
    est.add_argument(
        "--rule",
        choices=[r.value for r in Rule],
        default=Rule.LEPSKI_PRACTICAL.value,
    )
    est.add_argument("--c", type=float, default=2.1)
    est.add_argument("--k-min", dest="k_min", type=int, default=30)
    est.add_argument("--delta", type=float, default=0.1)
    est.add_argument("--out", help="JSON output path (default: stdout)")
    est.add_argument("--trace-csv", dest="trace_csv", help="also write (k, gamma_hat)")
    est.set_defaults(func=_cmd_estimate)

    prof = sub.add_parser("profile", help="RMSE-vs-k curve for one distribution")
    prof.add_argument("--dist", action="append")
    prof.add_argument("--k-grid", dest="k_grid", help="comma-separated k values")
    add_common(prof)
    prof.set_defaults(func=_cmd_profile)

    comp = sub.add_parser("compare", help="selector-vs-oracle comparison campaign")
    comp.add_argument("--dist", action="append")
    comp.add_argument(
        "--paper-tables",
        dest="paper_tables",
        action="store_true",
        help="run the full 12-distribution benchmark suite",
    )
    comp.add_argument("--c", type=float, default=2.1)
    comp.add_argument("--k-min", dest="k_min", type=int, default=30)
    comp.add_argument("--delta", type=float, default=0.1)
    comp.add_argument(
        "--replicates-out",
        dest="replicates_out",
        help="per-replicate (rule, k_hat, abs_std_err) CSV",
    )
    add_common(comp)
    comp.set_defaults(func=_cmd_compare)

    ver = sub.add_parser("verify", help="run one empirical check")
    ver.add_argument(
        "--check",
        required=True,
        choices=["variance", "bias", "gamma-tail", "order-stat-tail", "maxdev"],
    )
    ver.add_argument("--dist", default="Pcp")
    ver.add_argument("--k", type=int, default=100)
    ver.add_argument("--delta", type=float, default=0.1)
    ver.add_argument("--n-list", dest="n_list", default="1000,10000,100000")
    add_common(ver)
    ver.set_defaults(func=_cmd_verify)

    low = sub.add_parser("lowerbound", help="adversarial family arithmetic")
    low.add_argument("--gamma0", type=float, default=1.0)
    low.add_argument("--rho", type=float, default=-1.5)
    low.add_argument("--n", type=int, default=1_000_000)
    low.add_argument("--v", type=float, default=None)
    low.add_argument("--out", help="output path")
    low.set_defaults(func=_cmd_lowerbound)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list) -> list:
    """Fold --config JSON values in as defaults (CLI flags still win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise CliError(EXIT_CONFIG, "--config requires a path")
    try:
        with open(path) as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_CONFIG, f"bad config file {path}: {exc}")
    if not isinstance(values, dict):
        raise CliError(EXIT_CONFIG, "config file must hold a JSON object")
    for action in parser._subparsers._group_actions:  # noqa: SLF001
        for sub_parser in action.choices.values():
            known = {a.dest for a in sub_parser._actions}  # noqa: SLF001
            sub_parser.set_defaults(
                **{k: v for k, v in values.items() if k in known}
            )
    return argv[:idx] + argv[idx + 2 :]


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
