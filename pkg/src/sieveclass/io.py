"""CSV and JSON artifacts.

Series files have the header ``index,value`` and hold one series each.  A
cohort manifest is a JSON document listing series paths relative to the
manifest, with labels and seeds.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .errors import DataError
from .simgen import TimeSeriesRecord


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "" if np.isnan(x) else repr(x)


def write_series(path: Path, values: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "value"])
        for i, v in enumerate(values, start=1):
            w.writerow([i, fmt(v)])


def read_series(path: Path, record_id: Optional[str] = None,
                label: Optional[str] = None) -> TimeSeriesRecord:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read series file {path}: {exc}") from exc
    if not rows:
        raise DataError(f"empty series file {path}")
    header = [h.strip().lower() for h in rows[0]]
    if "value" in header:
        col, body = header.index("value"), rows[1:]
    else:
        col, body = len(rows[0]) - 1, rows
    try:
        values = np.array([float(r[col]) for r in body if r])
    except (ValueError, IndexError) as exc:
        raise DataError(f"malformed series file {path}: {exc}") from exc
    return TimeSeriesRecord(record_id or path.stem, values, label)


def write_manifest(path: Path, entries: list, config: dict, source: str) -> None:
    doc = {"version": __version__, "source": source, "config": config, "series": entries}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_manifest(path: Path):
    """Return ``(records, manifest_dict)``."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from exc
    records = []
    for entry in doc.get("series", []):
        rec = read_series(path.parent / entry["path"], entry.get("id"), entry.get("label"))
        rec.seed = entry.get("seed")
        records.append(rec)
    return records, doc


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def write_features(path: Path, features: Sequence) -> None:
    """Rows ``series_id, label, b, c, S, D1..D{max b}``."""
    width = max((f.b for f in features), default=0)
    header = ["series_id", "label", "b", "c", "S"] + [f"D{j}" for j in range(1, width + 1)]
    rows = []
    for f in features:
        d = [fmt(v) for v in f.D] + [""] * (width - f.b)
        rows.append([f.series_id, f.label or "", fmt(f.b), fmt(f.c), fmt(f.S)] + d)
    write_rows(path, header, rows)


def write_cv_table(path: Path, table: dict) -> None:
    write_rows(path, ["b", "c", "score"], [(b, c, table[(b, c)]) for b, c in sorted(table)])
