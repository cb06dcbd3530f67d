"""Deterministic JSON and CSV emission shared by grid fields, plans and the CLI.

JSON output sorts object keys and prints every float with 17 significant
digits, so identical inputs produce byte-identical text and every double
round-trips exactly.  NaN (used for masked residual nodes) serializes as
null; infinities are rejected.
"""

from __future__ import annotations

import json as _json
import math

import numpy as np

__all__ = ["format_float", "dumps", "grid_csv_text", "parse_grid_csv"]

FLOAT_FMT = ".17g"


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, FLOAT_FMT)


def _emit(obj, parts: list) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        parts.append(_json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            parts.append("null")
        elif math.isinf(x):
            raise ValueError("cannot serialize an infinite value to JSON")
        else:
            parts.append(format(x, FLOAT_FMT))
    elif isinstance(obj, dict):
        parts.append("{")
        for k, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if k:
                parts.append(", ")
            parts.append(_json.dumps(key))
            parts.append(": ")
            _emit(obj[key], parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        for k, item in enumerate(obj):
            if k:
                parts.append(", ")
            _emit(item, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps(obj) -> str:
    """JSON text with sorted keys and fixed 17-significant-digit floats."""
    parts: list = []
    _emit(obj, parts)
    return "".join(parts)


def grid_csv_text(x1s, x2s, values, header: str = "x1,x2,h") -> str:
    """Row-major CSV dump of a grid field: one line per sample."""
    values = np.asarray(values)
    lines = [header]
    for i in range(len(x1s)):
        a = format_float(x1s[i])
        row = values[i]
        for j in range(len(x2s)):
            lines.append(f"{a},{format_float(x2s[j])},{format_float(row[j])}")
    return "\n".join(lines) + "\n"


def parse_grid_csv(text: str, header: str = "x1,x2,h"):
    """Parse a row-major grid CSV back into (x1 origin, x2 origin, dx, values).

    The sample coordinates must form a uniform square-spaced grid written
    in row-major order; returns (origin_x1, origin_x2, dx, values) with
    values shaped (nx, ny).
    """
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != header:
        raise ValueError(f"expected CSV header {header!r}")
    rows = []
    for ln in lines[1:]:
        cols = ln.split(",")
        if len(cols) != 3:
            raise ValueError(f"expected 3 comma-separated columns, got {ln!r}")
        rows.append((float(cols[0]), float(cols[1]), float(cols[2])))
    data = np.asarray(rows, dtype=float)
    x1u = np.unique(data[:, 0])
    x2u = np.unique(data[:, 1])
    nx, ny = x1u.size, x2u.size
    if nx * ny != data.shape[0]:
        raise ValueError("samples do not form a complete rectangular grid")
    steps = np.concatenate([np.diff(x1u), np.diff(x2u)])
    if steps.size:
        dx = float(steps[0])
        if dx <= 0 or np.any(np.abs(steps - dx) > 1e-9 * max(1.0, abs(dx))):
            raise ValueError("grid spacing is not uniform")
    else:
        dx = 1.0
    expect_x1 = np.repeat(x1u, ny)
    expect_x2 = np.tile(x2u, nx)
    if np.any(np.abs(data[:, 0] - expect_x1) > 0) or np.any(np.abs(data[:, 1] - expect_x2) > 0):
        raise ValueError("grid CSV rows are not in row-major order")
    return float(x1u[0]), float(x2u[0]), dx, data[:, 2].reshape(nx, ny)
