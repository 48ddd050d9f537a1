#!/usr/bin/env python3
"""Full benchmark campaign: oracle indices, RMSE and selector comparison
for the whole distribution suite.

Writes tables.csv / tables.json plus per-distribution profile CSVs into
--out-dir.  At the published scale (n=10000, reps=5000) expect tens of
minutes single-core; use --workers.
"""

import argparse
import sys
from pathlib import Path

from tailadapt.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--reps", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    common = ["--n", str(args.n), "--reps", str(args.reps), "--seed", str(args.seed)]
    code = cli_main(
        [
            "compare",
            "--paper-tables",
            *common,
            "--workers",
            str(args.workers),
            "--out",
            str(out_dir / "tables.csv"),
            "--replicates-out",
            str(out_dir / "replicates.csv"),
        ]
    )
    if code != 0:
        return code
    for name in ("F1", "t4", "H", "Pcp", "stable"):
        code = cli_main(
            [
                "profile",
                "--dist",
                name,
                *common,
                "--workers",
                str(args.workers),
                "--out",
                str(out_dir / f"profile_{name}.csv"),
            ]
        )
        if code != 0:
            return code
    print(f"campaign written to {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
