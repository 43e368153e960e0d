"""CSV and JSON serialization of histories, paths and column tables.

Floats are written with 17 significant digits, so re-reading a file gives
back the exact doubles.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .cosmology import ScaleHistory, history_table
from .geodesics import GeodesicPath
from .types import CosmologyParams, ScaleState

FLOAT_FMT = "%.17g"
HISTORY_COLUMNS = ("t", "R", "Rdot", "Rddot", "rho", "lambda_tilde", "rho_tilde")
PATH_COLUMNS = ("lambda", "t", "x", "y", "z", "v0", "v1", "v2", "v3")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return FLOAT_FMT % float(x)


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def table_to_csv(table: dict, columns=None) -> str:
    """Render a dict of equal-length columns as CSV with one header row."""
    columns = list(columns or table.keys())
    n = len(next(iter(table.values())))
    lines = [",".join(columns)]
    for i in range(n):
        lines.append(",".join(_fmt(table[c][i]) for c in columns))
    return "\n".join(lines) + "\n"


def csv_to_table(text: str) -> dict:
    rows = list(csv.reader(text.splitlines()))
    header, body = rows[0], rows[1:]
    return {c: np.array([float(r[k]) for r in body]) for k, c in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def dumps_json(obj) -> str:
    # json emits the shortest repr that round-trips, which is at most 17 digits
    return json.dumps(_jsonable(obj), indent=2)


def write_text(path, text: str) -> None:
    _atomic_write(path, text)


# --- scale histories ---------------------------------------------------------

def history_to_table(hist: ScaleHistory, s: float | None = None, printed: bool = False) -> dict:
    return history_table(hist, s, printed)


def history_to_csv(hist: ScaleHistory, s: float | None = None, printed: bool = False) -> str:
    return table_to_csv(history_table(hist, s, printed), HISTORY_COLUMNS)


def history_to_json(hist: ScaleHistory, s: float | None = None, printed: bool = False) -> str:
    params = hist.params if s is None else hist.params.replace(s=float(s))
    return dumps_json({"params": params.as_dict(), "status": hist.status,
                       "columns": history_table(hist, s, printed)})


def read_history_csv(text: str, params: CosmologyParams) -> ScaleHistory:
    """Rebuild a sample-only history (no dense solution) from CSV text."""
    tab = csv_to_table(text)
    samples = [ScaleState(*row) for row in zip(tab["t"], tab["R"], tab["Rdot"], tab["Rddot"])]
    return ScaleHistory(samples, params, (samples[0].t, samples[-1].t))


def read_history_json(text: str) -> tuple[ScaleHistory, dict]:
    data = json.loads(text)
    params = CosmologyParams(**data["params"])
    cols = {k: np.asarray(v, dtype=float) for k, v in data["columns"].items()}
    samples = [ScaleState(*row) for row in zip(cols["t"], cols["R"], cols["Rdot"], cols["Rddot"])]
    hist = ScaleHistory(samples, params, (samples[0].t, samples[-1].t), status=data["status"])
    return hist, cols


# --- geodesic paths ----------------------------------------------------------

def path_to_table(path: GeodesicPath) -> dict:
    c, v = path.coords, path.v
    return {"lambda": path.lam, "t": c[:, 0], "x": c[:, 1], "y": c[:, 2], "z": c[:, 3],
            "v0": v[:, 0], "v1": v[:, 1], "v2": v[:, 2], "v3": v[:, 3]}


def path_to_csv(path: GeodesicPath) -> str:
    return table_to_csv(path_to_table(path), PATH_COLUMNS)


def path_to_json(path: GeodesicPath) -> str:
    return dumps_json({"metric_tag": path.metric_tag, "causal_class": path.causal_class,
                       "s": path.s, "R": path.R, "arc": path.arc, **path_to_table(path)})


def read_path_json(text: str) -> GeodesicPath:
    d = json.loads(text)
    coords = np.column_stack([d[k] for k in ("t", "x", "y", "z")])
    v = np.column_stack([d[f"v{i}"] for i in range(4)])
    return GeodesicPath(np.asarray(d["lambda"]), coords, v, np.asarray(d["R"]),
                        np.asarray(d["arc"]), d["metric_tag"], d["causal_class"], d["s"])
