"""Readers for the estimator CLI's output contracts.

CSV files carry ``# key=value`` metadata lines, then a header row, then
comma-separated data with '.' decimals and LF endings.  JSON documents
carry a {version, seed, config, ...} envelope.
"""

from __future__ import annotations

import json
from pathlib import Path


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


def read_csv(path, required: tuple) -> dict:
    """Parse one CSV into {column: list of floats or strings}.

    Raises:
        SchemaError: on empty input or when a required column is missing
            (the message names it).
    """
    path = Path(path)
    lines = [
        ln
        for ln in path.read_text().splitlines()
        if ln.strip() and not ln.startswith("#")
    ]
    if not lines:
        raise SchemaError(f"{path}: empty input")
    header = lines[0].split(",")
    for col in required:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    columns: dict = {name: [] for name in header}
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: ragged row: {ln!r}")
        for name, cell in zip(header, cells):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(cell)
    if not lines[1:]:
        raise SchemaError(f"{path}: no data rows")
    return columns


def read_result(path) -> dict:
    """Parse a selection-result JSON ({result: {k_hat, r_used, ...}})."""
    doc = json.loads(Path(path).read_text())
    result = doc.get("result", doc)
    for key in ("k_hat", "gamma_hat", "r_used"):
        if key not in result:
            raise SchemaError(f"{path}: missing field {key!r}")
    return result
