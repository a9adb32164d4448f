"""Binary vector files.

Layout, little-endian: magic ``b"BFIO"``, u32 version (1), u32 N, u8 domain
(0 = frequency, 1 = spatial), u64 count, then ``count`` complex values as
interleaved (re, im) float64 pairs. Values are stored bit-exactly.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"BFIO"
VERSION = 1
FREQUENCY = 0
SPATIAL = 1
_HEADER = struct.Struct("<4sIIBQ")


class VectorFormatError(ValueError):
    """Malformed or inconsistent vector file."""


def write_vector(path, values, N: int, domain: int = FREQUENCY) -> None:
    values = np.ascontiguousarray(values, dtype="<c16").ravel()
    if domain not in (FREQUENCY, SPATIAL):
        raise ValueError(f"domain must be 0 or 1, got {domain}")
    if values.size != N * N:
        raise ValueError(f"expected {N * N} values for N={N}, got {values.size}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, N, domain, values.size))
        fh.write(values.tobytes())


def read_vector(path) -> tuple[np.ndarray, int, int]:
    """Return (values, N, domain)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise VectorFormatError(f"{path}: truncated header")
    magic, version, N, domain, count = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise VectorFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise VectorFormatError(f"{path}: unsupported version {version}")
    if domain not in (FREQUENCY, SPATIAL):
        raise VectorFormatError(f"{path}: unknown domain tag {domain}")
    if count != N * N:
        raise VectorFormatError(f"{path}: count {count} does not match N={N}")
    body = raw[_HEADER.size:]
    if len(body) != 16 * count:
        raise VectorFormatError(f"{path}: expected {16 * count} payload bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<c16").astype(complex), N, domain
