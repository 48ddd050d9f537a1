#!/usr/bin/env python3
"""Run the whole empirical verification battery and dump JSON reports."""

import argparse
import json
import sys
from pathlib import Path

from tailadapt.distributions import h_dist, pareto_change_point, pure_pareto
from tailadapt.verify import (
    check_bias_identity,
    check_gamma_tail,
    check_maxdev_scaling,
    check_order_stat_tail,
    check_variance_bounds,
)

SPECS = {
    "pareto": pure_pareto(1.0),
    "pcp": pareto_change_point(1.5, 1.0, 15.0),
    "hdist": h_dist(),
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--reps", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="verification.json")
    args = ap.parse_args()

    reports = []
    for label, spec in SPECS.items():
        for k in (50, 100, 500):
            reports.append(
                check_variance_bounds(spec, k, args.n, args.reps, (args.seed, 1, k))
            )
        if label != "pareto":
            reports.append(
                check_bias_identity(spec, 100, args.n, args.reps, (args.seed, 2))
            )
    for k, delta in ((10, 0.01), (100, 0.1)):
        reports.append(check_gamma_tail(k, 100_000, delta, (args.seed, 3, k)))
    for n, k, delta in ((10_000, 100, 0.1), (1000, 30, 0.01)):
        reports.append(
            check_order_stat_tail(n, k, delta, 100_000, (args.seed, 4, n))
        )
    reports.append(
        check_maxdev_scaling([1000, 10_000, 100_000], 500, (args.seed, 5))
    )

    docs = [r.to_json() for r in reports]
    payload = {
        "notes": [
            "the adaptive-selection oracle inequality is exercised through "
            "the comparison campaign (scripts/run_paper_tables.py), not as a "
            "direct finite-sample check: its explicit constants are too "
            "conservative to bind at these sample sizes"
        ],
        "reports": docs,
    }
    Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    failed = [d["check"] for d in docs if not d["pass"]]
    for doc in docs:
        print(f"{'PASS' if doc['pass'] else 'FAIL'}  {doc['check']}  {doc['params']}")
    print(f"{len(docs) - len(failed)}/{len(docs)} checks passed -> {args.out}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
