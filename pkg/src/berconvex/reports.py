"""JSON and CSV report writing.

A report is a volatile ``header`` (timestamp) plus a deterministic ``body``;
identical inputs give byte-identical bodies. Files are written atomically.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable

import numpy as np

CSV_COLUMNS = ("variable", "value", "quantity", "estimate", "std_error", "method", "flags")


def _clean(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def header(version: str) -> dict[str, Any]:
    now = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0)
    return {"tool": "berconvex", "version": version, "generated": now.isoformat()}


def render_json(body: dict[str, Any], head: dict[str, Any]) -> str:
    doc = {"header": _clean(head), "body": _clean(body)}
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def render_csv(rows: Iterable[dict[str, Any]], head: dict[str, Any]) -> str:
    buf = io.StringIO()
    for k, v in head.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(r[k])) if k in ("value", "estimate", "std_error")
                        and r[k] is not None else r[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def body_of(text: str) -> str:
    """Strip the volatile header from a rendered report."""
    if text.lstrip().startswith("{"):
        return json.dumps(json.loads(text)["body"], indent=2)
    return "".join(line for line in text.splitlines(True) if not line.startswith("#"))


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        os.chmod(tmp, 0o644)
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
