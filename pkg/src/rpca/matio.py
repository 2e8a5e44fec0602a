"""Matrix file formats: a bit-exact binary container and plain CSV.

Binary layout (little-endian): magic ``RPCM``, version u16 = 1, rows u64,
cols u64, then rows x cols float64 values in row-major order.  CSV files hold
one row per line with comma-separated decimals printed at 17 significant
digits, which round-trips float64 exactly.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .kernel import ensure_matrix

__all__ = [
    "MAGIC",
    "VERSION",
    "MalformedHeaderError",
    "MatrixIOError",
    "NonFiniteValuesError",
    "RaggedRowsError",
    "read_matrix",
    "write_matrix",
]

MAGIC = b"RPCM"
VERSION = 1
_HEADER = struct.Struct("<4sHQQ")


class MatrixIOError(ValueError):
    """A matrix file could not be read or written."""


class MalformedHeaderError(MatrixIOError):
    """Binary header is missing, corrupt, or inconsistent with the payload."""


class RaggedRowsError(MatrixIOError):
    """CSV rows do not all have the same number of fields."""


class NonFiniteValuesError(MatrixIOError):
    """The file parses but contains NaN or infinite entries."""


def _format_of(path, fmt):
    if fmt is not None:
        if fmt not in ("bin", "csv"):
            raise ValueError(f"unknown matrix format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".bin":
        return "bin"
    raise ValueError(f"cannot infer matrix format from {path!r}; pass fmt='bin' or 'csv'")


def write_matrix(a, path, fmt=None):
    """Write ``a`` to ``path``; the format is inferred from the suffix unless given.

    Binary round-trips are bitwise exact.  Empty matrices are rejected.
    """
    a = ensure_matrix(a)
    fmt = _format_of(path, fmt)
    path = Path(path)
    if fmt == "bin":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, a.shape[0], a.shape[1]))
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in a:
            fh.write(",".join(f"{value:.17g}" for value in row))
            fh.write("\n")


def read_matrix(path, fmt=None):
    """Read a matrix written by :func:`write_matrix`."""
    fmt = _format_of(path, fmt)
    if fmt == "bin":
        return _read_bin(Path(path))
    return _read_csv(Path(path))


def _read_bin(path):
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise MalformedHeaderError(f"{path}: file shorter than the {_HEADER.size}-byte header")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise MalformedHeaderError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise MalformedHeaderError(f"{path}: unsupported version {version}")
    if rows == 0 or cols == 0:
        raise MalformedHeaderError(f"{path}: empty matrix ({rows} x {cols})")
    expected = _HEADER.size + 8 * rows * cols
    if len(raw) != expected:
        raise MalformedHeaderError(
            f"{path}: payload holds {len(raw) - _HEADER.size} bytes, header promises {expected - _HEADER.size}"
        )
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    out = values.reshape(rows, cols).astype(np.float64)
    if not np.isfinite(out).all():
        raise NonFiniteValuesError(f"{path}: non-finite entries")
    return out


def _read_csv(path):
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise RaggedRowsError(
                    f"{path}: row {line_no} has {len(fields)} fields, expected {width}"
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                raise MatrixIOError(f"{path}: unparseable value in row {line_no}") from None
    if not rows:
        raise MatrixIOError(f"{path}: empty matrix file")
    out = np.array(rows, dtype=np.float64)
    if not np.isfinite(out).all():
        raise NonFiniteValuesError(f"{path}: non-finite entries")
    return out
