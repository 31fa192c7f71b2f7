"""Binary tensor container ("MFT") and CSV export.

File layout, fixed across every tool in this project:

* bytes 0-3: magic ``b"MFT1"``
* byte 4: tensor order as an unsigned 8-bit integer
* next ``4 * order`` bytes: dimensions, little-endian uint32
* remainder: entries as little-endian IEEE-754 float64, row-major
  (last index varies fastest).  NaN entries encode gaps.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

MAGIC = b"MFT1"

__all__ = ["MAGIC", "write_mft", "read_mft", "export_csv"]


def write_mft(path: str | Path, tensor: np.ndarray) -> Path:
    """Write an array to ``path`` in the MFT container format."""
    t = np.ascontiguousarray(tensor, dtype=np.float64)
    if t.ndim < 1 or t.ndim > 255:
        raise ValueError(f"unsupported tensor order {t.ndim}")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([t.ndim]))
        fh.write(np.asarray(t.shape, dtype="<u4").tobytes())
        fh.write(t.astype("<f8", copy=False).tobytes())
    return path


def read_mft(path: str | Path) -> np.ndarray:
    """Read an MFT file back into a float64 array."""
    raw = Path(path).read_bytes()
    if len(raw) < 5 or raw[:4] != MAGIC:
        raise ValueError(f"{path}: not an MFT file (bad magic)")
    order = raw[4]
    header_end = 5 + 4 * order
    if len(raw) < header_end:
        raise ValueError(f"{path}: truncated header")
    dims = np.frombuffer(raw, dtype="<u4", count=order, offset=5)
    if np.any(dims == 0):
        raise ValueError(f"{path}: zero dimension in header")
    n = int(np.prod(dims.astype(np.int64)))
    expected = header_end + 8 * n
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for dims {tuple(dims)}, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", count=n, offset=header_end)
    return data.astype(np.float64).reshape(tuple(int(d) for d in dims))


def export_csv(path: str | Path, tensor: np.ndarray) -> Path:
    """Dump one ``(indices..., value)`` row per entry, for spot inspection."""
    t = np.asarray(tensor, dtype=np.float64)
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"i{d}" for d in range(t.ndim)] + ["value"])
        for idx in np.ndindex(*t.shape):
            writer.writerow(list(idx) + [repr(float(t[idx]))])
    return path
