"""CSV tables with ``#``-prefixed metadata headers."""
from __future__ import annotations

import csv
import math
from pathlib import Path

from .params import RATE_NAMES

METRIC_COLUMNS = ("I", "beta", "F_dB", "I_analytic", "beta_analytic", "F_analytic_dB", "converged", "regime_ok")
BOOL_COLUMNS = ("converged", "regime_ok")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.9g}"


def _metric_fields(row) -> list:
    return [fmt(getattr(row, c)) for c in METRIC_COLUMNS]


def _write(path, meta: dict, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for key, value in meta.items():
            if isinstance(value, dict):
                value = " ".join(f"{k}={fmt(v)}" for k, v in value.items())
            elif isinstance(value, (list, tuple)):
                value = " ".join(str(v) for v in value)
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_sweep_csv(result, path):
    header = list(result.axis_names) + list(METRIC_COLUMNS)
    rows = [[fmt(v) for v in r.axis_values] + _metric_fields(r) for r in result.rows]
    return _write(path, result.metadata, header, rows)


def write_point_csv(params, row, path, meta: dict | None = None):
    """One-row table: every rate followed by the same metric columns as a sweep."""
    header = list(RATE_NAMES) + list(METRIC_COLUMNS)
    values = [fmt(getattr(params, n)) for n in RATE_NAMES] + _metric_fields(row)
    meta = {"base": params.as_dict(), **(meta or {})}
    return _write(path, meta, header, [values])


def read_csv(path):
    """Parse a funnelkit table back into ``(metadata, header, rows)``.

    Numeric fields come back as floats and boolean columns as bools.
    """
    meta = {}
    lines = []
    with Path(path).open() as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                meta[key.strip()] = value.strip()
            elif line.strip():
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    rows = []
    for raw in reader:
        row = {}
        for name, text in zip(header, raw):
            row[name] = text == "1" if name in BOOL_COLUMNS else float(text)
        rows.append(row)
    return meta, header, rows
