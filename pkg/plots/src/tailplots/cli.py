"""plots <kind> --in <csv> [--result <json>] --out <img>

Kinds: risk_profile, alt_hill_ribbon, risk_comparison, selection_density.
Inputs follow the estimator CLI's CSV/JSON contracts; nothing is written
unless rendering succeeds.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from tailplots.figures import (
    alt_hill_ribbon,
    risk_comparison,
    risk_profile,
    selection_density,
)
from tailplots.io import SchemaError, read_csv, read_result

KINDS = ("risk_profile", "alt_hill_ribbon", "risk_comparison", "selection_density")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        help="input CSV (repeatable for risk_comparison)",
    )
    parser.add_argument("--result", help="selection-result JSON (alt_hill_ribbon)")
    parser.add_argument(
        "--profile", help="risk-profile CSV overlay (selection_density)"
    )
    parser.add_argument("--oracle", type=int, help="oracle index to mark")
    parser.add_argument("--rule", help="restrict replicate file to one rule")
    parser.add_argument(
        "--linear-index",
        action="store_true",
        help="linear k axis for the alt-Hill plot (default: log)",
    )
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def render(args) -> None:
    if args.kind == "risk_profile":
        data = read_csv(args.inputs[0], required=("k", "rmse"))
        fig = risk_profile(data, label=Path(args.inputs[0]).stem)
    elif args.kind == "risk_comparison":
        datasets = {
            Path(p).stem.removeprefix("profile_"): read_csv(p, required=("k", "rmse"))
            for p in args.inputs
        }
        fig = risk_comparison(datasets)
    elif args.kind == "alt_hill_ribbon":
        data = read_csv(args.inputs[0], required=("k", "gamma_hat"))
        result = read_result(args.result) if args.result else None
        fig = alt_hill_ribbon(
            data,
            result=result,
            oracle_k=args.oracle,
            log_index=not args.linear_index,
        )
    else:
        points = read_csv(args.inputs[0], required=("rule", "k_hat", "abs_std_err"))
        profile = (
            read_csv(args.profile, required=("k", "rmse")) if args.profile else None
        )
        fig = selection_density(points, profile=profile, rule=args.rule)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args)
    except (SchemaError, OSError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
