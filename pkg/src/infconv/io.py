"""Report serialisation: JSON with 17 significant digits, CSV tables and grid files."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .grid import GridFunction, GridSpec

__all__ = ["format_real", "dumps_json", "reports_to_csv", "grid_function_to_csv", "read_grid_csv"]


def format_real(x: float) -> str:
    """17 significant digits (lossless for doubles); ``inf`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = format_real(obj)
        # JSON has no infinities; keep them as strings
        return json.dumps(s) if s in ("inf", "-inf", "nan") else s
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_real(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def reports_to_csv(rows: list[dict]) -> str:
    """Scalar and list fields of each report; nested dicts are flattened with dotted keys."""
    flat_rows = []
    for row in rows:
        flat = {}
        for k, v in row.items():
            if isinstance(v, dict):
                for kk, vv in v.items():
                    flat[f"{k}.{kk}"] = vv
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                continue
            else:
                flat[k] = v
        flat_rows.append(flat)
    header = []
    for row in flat_rows:
        header.extend(k for k in row if k not in header)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in flat_rows:
        w.writerow([_cell(row.get(k)) for k in header])
    return buf.getvalue()


def grid_function_to_csv(f: GridFunction) -> str:
    """Header ``x0,...,x{d-1},value`` then one row per node in row-major order."""
    d = f.grid.d
    coords = f.grid.nodes().reshape(-1, d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{k}" for k in range(d)] + ["value"])
    for xs, v in zip(coords, f.samples):
        w.writerow([format_real(x) for x in xs] + [format_real(v)])
    return buf.getvalue()


def read_grid_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Load a grid CSV as ``(coords (N, d), values (N,))``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=np.float64)
    return data[:, :-1], data[:, -1]


def grid_from_csv(path: str | Path, grid: GridSpec) -> GridFunction:
    _, values = read_grid_csv(path)
    return GridFunction(grid, values)
