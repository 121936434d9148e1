"""Byte-stable writers: CSV (LF, repr floats), binary PGM P5 and sorted JSON."""

import csv
import json
import os

import numpy as np

from ..errors import ZerolocError

PGM_MAXVAL = 65535


class OutputError(ZerolocError, OSError):
    """Writing an output file failed; the message carries the path."""


def fmt(value):
    """Shortest round-trip text for floats, plain text for everything else."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {path}: {exc}") from exc


def _open(path, mode):
    try:
        if "b" in mode:
            return open(path, mode)
        return open(path, mode, encoding="utf-8", newline="")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def write_csv(path, header, rows):
    with _open(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj):
    # json uses repr for floats, which is the shortest round-trip form
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    text = dumps(obj)
    with _open(path, "w") as fh:
        fh.write(text)


def pgm_bytes(values):
    """P5 image, maxval 65535, big-endian samples. Row 0 of ``values`` is min y,
    so rows are flipped to put max y at the top."""
    values = np.asarray(values, dtype=np.float64)
    peak = values.max() if values.size else 0.0
    if peak > 0:
        scaled = np.rint(values / peak * PGM_MAXVAL)
    else:
        scaled = np.zeros_like(values)
    pixels = np.clip(scaled, 0, PGM_MAXVAL).astype(">u2")[::-1]
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + pixels.tobytes()


def write_pgm(path, values):
    data = pgm_bytes(values)
    with _open(path, "wb") as fh:
        fh.write(data)
