"""CSV and JSON writers with reproducible number formatting."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .ring import PairState, correlation_map

__all__ = ["format_float", "write_csv", "write_json", "emit_gamma_map"]


def format_float(x: float) -> str:
    """17 significant digits in scientific notation (round-trips every double)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return format(x, ".16e")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def write_csv(path, header, rows) -> Path:
    """UTF-8, LF line endings, comma-separated, one header row."""
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        lines.append(",".join(_cell(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_json(path, meta) -> Path:
    # json.dumps uses repr() for floats, i.e. the shortest round-trip form
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n")
    return path


def emit_gamma_map(state: PairState, path, extra: dict | None = None) -> tuple[Path, Path]:
    """Write the joint-detection map (row k, column j) plus a JSON sidecar.

    Uses the joint convention: the matrix sums to one, so a particle pair on
    distinct sites j, r shows up as 0.5 at (j, r) and at (r, j).
    """
    path = Path(path)
    g = correlation_map(state, convention="joint")
    n = state.n_sites
    header = ["k"] + [f"j{j}" for j in range(1, n + 1)]
    rows = [[k + 1] + list(g[k]) for k in range(n)]
    csv_path = write_csv(path, header, rows)
    meta = {
        "n_sites": n,
        "statistics": state.statistics.value,
        "gamma_t": state.time,
        "initial": list(state.initial) if state.initial else None,
        "convention": "joint",
        "rows": "k (1-based site of one particle)",
        "columns": "j (1-based site of the other particle)",
    }
    meta.update(extra or {})
    json_path = write_json(path.with_suffix(".json"), meta)
    return csv_path, json_path
