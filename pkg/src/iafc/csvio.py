"""CSV with ``#``-prefixed ``key=value`` metadata lines and a header row."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__


def write_csv(path, columns: Sequence[str], data, metadata: Mapping | None = None) -> Path:
    """Write ``data`` (rows, or a 2-D array with one column per name) to ``path``."""
    path = Path(path)
    meta = {"artifact_version": __version__}
    meta.update(metadata or {})
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, len(columns))
    with path.open("w", newline="") as fh:
        for k, v in meta.items():
            fh.write(f"# {k}={_fmt_meta(v)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in arr:
            w.writerow([repr(float(x)) for x in row])
    return path


def read_csv(path):
    """Return ``(metadata, columns, data)`` with ``data`` a 2-D float array."""
    meta = {}
    rows = []
    columns = None
    with Path(path).open(newline="") as fh:
        for line in fh:
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            parts = next(csv.reader([s]))
            if columns is None:
                columns = [p.strip() for p in parts]
            else:
                rows.append([float(p) for p in parts])
    if columns is None:
        raise ValueError(f"{path}: no header row")
    data = np.array(rows, dtype=float).reshape(-1, len(columns))
    return meta, columns, data


def _fmt_meta(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_fmt_meta(x) for x in v)
    if isinstance(v, np.generic):
        return repr(v.item())
    return str(v)
