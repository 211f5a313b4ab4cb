"""JSON and CSV emission. Every artifact carries the run configuration."""

from __future__ import annotations

import csv
import io
import json
import math
import sys

import numpy as np


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _emit(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def write_json(path, record: dict, run_config: dict) -> None:
    _emit(dumps({**record, "run_config": run_config}), path)


def csv_text(header, rows, run_config: dict | None = None) -> str:
    buf = io.StringIO()
    if run_config is not None:
        buf.write("# run_config: " + json.dumps(_clean(run_config), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if isinstance(v, float) and math.isnan(v) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, run_config: dict | None = None) -> None:
    _emit(csv_text(header, rows, run_config), path)


def read_csv(path) -> tuple[dict | None, list[dict]]:
    """Rows of a CSV written here, with the run configuration if present."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    config = None
    if lines and lines[0].startswith("# run_config: "):
        config = json.loads(lines[0][len("# run_config: "):])
        lines = lines[1:]
    return config, list(csv.DictReader(lines))


def trace_rows(trace):
    header = ["epoch", "L_estimate"] + [f"p_{b + 1}" for b in range(trace.p.shape[1])]
    return header, trace.to_rows()


def accuracy_rows(table: dict):
    """Accuracy table: one row per method, one column per dataset."""
    datasets = list(dict.fromkeys(d for row in table.values() for d in row))
    header = ["method", *datasets]
    rows = [[m, *(f"{row[d].rate:.4f}" if d in row else "" for d in datasets)] for m, row in table.items()]
    return header, rows
