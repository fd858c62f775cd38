"""Deterministic CSV/JSON writers with embedded provenance.

CSV files start with one ``# provenance: {...}`` comment line (compact JSON,
sorted keys), followed by a header row and ``.15g``-formatted data. JSON files are written
with sorted keys, so identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

FORMATS = ("csv", "json")
PROVENANCE_PREFIX = "# provenance: "


def formats_for(choice: str) -> tuple[str, ...]:
    return FORMATS if choice == "both" else (choice,)


def format_number(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".15g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no inf/nan; keep them readable as strings
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def write_csv(path: Path, header, rows, provenance: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    if provenance is not None:
        blob = json.dumps(_jsonable(provenance), sort_keys=True, separators=(",", ":"))
        buf.write(f"{PROVENANCE_PREFIX}{blob}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_csv(path: Path) -> tuple[dict, list[str], list[list[str]]]:
    """Inverse of :func:`write_csv`: ``(provenance, header, rows)`` with rows as strings."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    prov = {}
    if text and text[0].startswith(PROVENANCE_PREFIX):
        prov = json.loads(text[0][len(PROVENANCE_PREFIX):])
    rows = list(csv.reader(ln for ln in text if not ln.startswith("#")))
    return prov, rows[0], rows[1:]


def write_table(out_dir: Path, stem: str, header, rows, provenance: dict, fmt: str) -> list[Path]:
    """Write ``stem.csv`` and/or ``stem.json``; the JSON holds provenance plus column-keyed records."""
    out = []
    for f in formats_for(fmt):
        path = Path(out_dir) / f"{stem}.{f}"
        if f == "csv":
            out.append(write_csv(path, header, rows, provenance))
        else:
            records = [dict(zip(header, row)) for row in rows]
            out.append(write_json(path, {"provenance": provenance, "columns": list(header), "rows": records}))
    return out


def beta_label(beta: float) -> str:
    return format(float(beta), ".6g")
