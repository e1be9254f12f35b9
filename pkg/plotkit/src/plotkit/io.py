"""CSV readers for the experiment runner's output schemas."""

import csv

import numpy as np

RUNS_COLUMNS = ["seed", "episode", "steps", "return", "epsilon"]


class SchemaError(ValueError):
    """A CSV did not match the expected experiment schema."""


def _check_columns(path, header, required):
    for col in required:
        if col not in header:
            raise SchemaError(f"{path}: missing column '{col}' "
                              f"(found {header})")


def read_runs(path):
    """Per-episode rows as a dict of numpy columns."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        _check_columns(path, reader.fieldnames or [], RUNS_COLUMNS)
        rows = list(reader)
    out = {}
    for col in RUNS_COLUMNS:
        kind = int if col in ("seed", "episode", "steps") else float
        try:
            out[col] = np.array([kind(r[col]) for r in rows])
        except ValueError as e:
            raise SchemaError(f"{path}: bad value in column '{col}': {e}")
    return out


def read_heatmap(path):
    """Returns (unit_ids, values[H x 121])."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if not header or header[0] != "unit":
            raise SchemaError(f"{path}: expected 'unit' as first column")
        rows = list(reader)
    units = np.array([int(r[0]) for r in rows])
    values = np.array([[float(v) for v in r[1:]] for r in rows])
    if values.shape[1] != len(header) - 1:
        raise SchemaError(f"{path}: ragged rows")
    return units, values


def read_units_summary(path):
    """Returns list of (method, units, mean_steps, stderr-or-None)."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        _check_columns(path, header, ["method", "units", "mean_steps"])
        has_stderr = "stderr" in header
        rows = []
        for r in reader:
            rows.append((r["method"], int(r["units"]), float(r["mean_steps"]),
                         float(r["stderr"]) if has_stderr else None))
    return rows
