#!/usr/bin/env python3
"""Regenerate the committed test fixtures from the estimator CLI.

Deterministic: fixed seeds, small sizes.  Run from the repository root
with the primary package installed.
"""

import sys
from pathlib import Path

from tailadapt.cli import main as cli_main
from tailadapt.distributions import spec_by_name, sample

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main() -> int:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name in ("F1", "t4", "H"):
        code = cli_main(
            [
                "profile",
                "--dist",
                name,
                "--n",
                "2000",
                "--reps",
                "300",
                "--seed",
                "42",
                "--out",
                str(FIXTURES / f"profile_{name}.csv"),
            ]
        )
        if code != 0:
            return code

    data = sample(spec_by_name("t1"), 10_000, 42)
    raw = FIXTURES / "cauchy_sample.txt"
    raw.write_text("\n".join(f"{float(x)!r}" for x in data.values) + "\n")
    code = cli_main(
        [
            "estimate",
            "--input",
            str(raw),
            "--out",
            str(FIXTURES / "result_cauchy.json"),
            "--trace-csv",
            str(FIXTURES / "trace_cauchy.csv"),
        ]
    )
    raw.unlink()
    if code != 0:
        return code

    code = cli_main(
        [
            "compare",
            "--dist",
            "Pcp",
            "--n",
            "2000",
            "--reps",
            "300",
            "--seed",
            "42",
            "--out",
            str(FIXTURES / "compare_Pcp.csv"),
            "--replicates-out",
            str(FIXTURES / "replicates_Pcp.csv"),
        ]
    )
    if code != 0:
        return code
    code = cli_main(
        [
            "profile",
            "--dist",
            "Pcp",
            "--n",
            "2000",
            "--reps",
            "300",
            "--seed",
            "42",
            "--out",
            str(FIXTURES / "profile_Pcp.csv"),
        ]
    )
    if code != 0:
        return code
    print(f"fixtures written to {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
