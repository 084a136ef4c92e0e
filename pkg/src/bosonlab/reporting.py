"""Report serialization: JSON-lines (canonical) and CSV (spreadsheet view).

Floats are written with 17 significant digits, so re-reading a report yields
numerically identical records.  The canonical stream contains no volatile
fields (timings live in the run log), which keeps byte-identical output for
identical configuration and seed.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path


def _render(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return f"{value:.17g}"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{_render(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_render(v) for v in value) + "]"
    if hasattr(value, "item"):  # numpy scalars
        return _render(value.item())
    if hasattr(value, "tolist"):  # numpy arrays
        return _render(value.tolist())
    raise TypeError(f"cannot serialize {type(value)!r}")


def to_json_line(record: dict) -> str:
    return _render(record)


def read_jsonl(path) -> list:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def _flatten(record: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (list, tuple)):
        return _render(value)
    if hasattr(value, "item"):
        return _csv_cell(value.item())
    return str(value)


def emit_report(records: list, out_dir, formats=("jsonl",), stem: str = "report") -> list:
    """Write records to out_dir in the requested formats; returns the paths.

    JSON-lines: one record per line, 17-significant-digit floats.  CSV:
    flattened dotted column names in first-appearance order, stable across
    runs with the same record structure.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    if "jsonl" in formats:
        path = out_dir / f"{stem}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(to_json_line(record) + "\n")
        paths.append(path)
    if "csv" in formats:
        path = out_dir / f"{stem}.csv"
        flat = [_flatten(r) for r in records]
        columns: list = []
        for row in flat:
            for key in row:
                if key not in columns:
                    columns.append(key)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in flat:
                writer.writerow([_csv_cell(row.get(c)) for c in columns])
        paths.append(path)
    return paths
