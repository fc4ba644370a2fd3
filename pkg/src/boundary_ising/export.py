"""Versioned CSV / JSON writers used by the command-line tools."""
from __future__ import annotations

import csv
import json
from pathlib import Path

SCHEMA = "boundary-ising/1"


def _clean(v):
    # repr keeps full double precision
    if isinstance(v, (float, complex)):
        return repr(float(v)) if isinstance(v, float) else repr(v)
    if hasattr(v, "item"):
        return _clean(v.item())
    return v


def write_csv(path, columns, rows, kind: str) -> Path:
    """CSV with a leading ``# schema=... kind=...`` comment line, then the header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema={SCHEMA} kind={kind}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            vals = [r.get(c) for c in columns] if isinstance(r, dict) else list(r)
            w.writerow([_clean(v) for v in vals])
    return path


def read_csv(path):
    """Inverse of :func:`write_csv`: returns (meta, list of dict rows) with string values."""
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        meta = dict(kv.split("=", 1) for kv in first.lstrip("# ").split())
        rows = list(csv.DictReader(fh))
    return meta, rows


def _default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write_json(path, payload: dict, kind: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema": SCHEMA, "kind": kind, **payload}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")
    return path


def write_table(out_dir, stem: str, columns, rows, kind: str, fmt: str = "csv") -> Path:
    """Write rows as ``<stem>.csv`` or as ``<stem>.json`` (a list of records)."""
    out_dir = Path(out_dir)
    if fmt == "csv":
        return write_csv(out_dir / f"{stem}.csv", columns, rows, kind)
    recs = [r if isinstance(r, dict) else dict(zip(columns, r)) for r in rows]
    return write_json(out_dir / f"{stem}.json", {"columns": list(columns), "rows": recs}, kind)
