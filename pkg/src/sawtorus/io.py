"""CSV and PGM writers shared by the command-line front end."""
from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import numpy as np


def format_value(v) -> str:
    """17 significant digits for floats, p/q for rationals, ``n/a`` for missing values."""
    if v is None:
        return "n/a"
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def pgm_bytes(raster) -> tuple:
    """8-bit grey levels of ``raster`` scaled affinely onto 0..255, rounding halves up.

    Returns (levels, lo, hi).  A constant raster maps to all zeros.
    """
    x = np.asarray(raster, dtype=float)
    if x.ndim != 2 or not np.isfinite(x).all():
        raise ValueError("raster must be a finite 2-d array")
    lo, hi = float(x.min()), float(x.max())
    if hi > lo:
        levels = np.floor((x - lo) / (hi - lo) * 255.0 + 0.5)
    else:
        levels = np.zeros_like(x)
    return np.clip(levels, 0, 255).astype(np.uint8), lo, hi


def write_pgm(path, raster):
    """Binary P5 image plus a ``<name>.range.txt`` sidecar holding the value range."""
    path = Path(path)
    levels, lo, hi = pgm_bytes(raster)
    rows, cols = levels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(levels.tobytes())
    with open(path.with_name(path.stem + ".range.txt"), "w") as fh:
        fh.write(f"min {format_value(lo)}\nmax {format_value(hi)}\n")


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    head = data.split(b"\n", 3)
    if head[0] != b"P5":
        raise ValueError("not a binary PGM file")
    cols, rows = (int(t) for t in head[1].split())
    return np.frombuffer(head[3], dtype=np.uint8, count=rows * cols).reshape(rows, cols)


def write_manifest(path, items: dict):
    with open(path, "w") as fh:
        for key in sorted(items):
            fh.write(f"{key} = {format_value(items[key])}\n")

