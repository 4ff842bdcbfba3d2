"""FLD1 binary container for gridded fields.

Record layout (little-endian):
  magic "FLD1" | u32 version | u32 dim | u32 kind | u32 N | f64 L | f64 time
  then the f64 payload, row-major, one component after another.
kind: 0 scalar (1 component), 1 vector (dim), 2 tensor (dim*dim).
time NaN encodes a static field. Version 1 is the plain record; version 2
inserts a kernel-cache extension (u32 kernel id, u32 packed index tuple)
between the header and the payload. Time series are stored as back-to-back
records and read until EOF.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError
from .fields import Grid, ScalarField, TensorField, TimeSeriesField, VectorField

MAGIC = b"FLD1"
_HEADER = struct.Struct("<4sIIIIdd")
_EXT = struct.Struct("<II")

KIND_SCALAR = 0
KIND_VECTOR = 1
KIND_TENSOR = 2

_COMPONENTS = {KIND_SCALAR: lambda d: 1, KIND_VECTOR: lambda d: d, KIND_TENSOR: lambda d: d * d}


def _kind_of(field) -> int:
    if isinstance(field, ScalarField):
        return KIND_SCALAR
    if isinstance(field, VectorField):
        return KIND_VECTOR
    if isinstance(field, TensorField):
        return KIND_TENSOR
    raise FormatError(f"cannot serialize {type(field).__name__}")


def _payload_arrays(field):
    if isinstance(field, ScalarField):
        return [field.values]
    if isinstance(field, VectorField):
        return [c.values for c in field.components]
    return [field.component(i, j).values for i in range(field.grid.dim) for j in range(field.grid.dim)]


def _encode(field, version: int = 1, extension: bytes = b"") -> bytes:
    g = field.grid
    t = field.time if field.time is not None else np.nan
    head = _HEADER.pack(MAGIC, version, g.dim, _kind_of(field), g.points, g.extent, t)
    body = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in _payload_arrays(field))
    return head + extension + body


def write_field(path, field):
    with open(path, "wb") as fh:
        fh.write(_encode(field))


def write_series(path, series: TimeSeriesField):
    with open(path, "wb") as fh:
        for frame in series.frames:
            fh.write(_encode(frame))


def _read_record(buf: bytes, offset: int):
    if len(buf) - offset < _HEADER.size:
        raise FormatError("truncated header", offset)
    magic, version, dim, kind, n, extent, t = _HEADER.unpack_from(buf, offset)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}", offset)
    if version not in (1, 2):
        raise FormatError(f"unsupported version {version}", offset + 4)
    if dim not in (2, 3):
        raise FormatError(f"dim {dim} not supported", offset + 8)
    if kind not in _COMPONENTS:
        raise FormatError(f"unknown kind {kind}", offset + 12)
    if n < 4 or n % 2:
        raise FormatError(f"invalid N {n}", offset + 16)
    if not np.isfinite(extent) or extent <= 0:
        raise FormatError(f"invalid extent {extent}", offset + 20)
    pos = offset + _HEADER.size
    ext = None
    if version == 2:
        if len(buf) - pos < _EXT.size:
            raise FormatError("truncated kernel extension", pos)
        ext = _EXT.unpack_from(buf, pos)
        pos += _EXT.size
    ncomp = _COMPONENTS[kind](dim)
    count = ncomp * n**dim
    nbytes = 8 * count
    if len(buf) - pos < nbytes:
        raise FormatError(
            f"payload needs {nbytes} bytes, record has {len(buf) - pos}", pos
        )
    flat = np.frombuffer(buf, dtype="<f8", count=count, offset=pos)
    pos += nbytes
    grid = Grid(dim, extent, n)
    time = None if np.isnan(t) else float(t)
    shape = (ncomp,) + grid.shape
    arrays = flat.reshape(shape).astype(np.float64)
    if kind == KIND_SCALAR:
        field = ScalarField(grid, arrays[0], time)
    elif kind == KIND_VECTOR:
        field = VectorField.from_arrays(grid, list(arrays), time)
    else:
        mats = [[arrays[i * dim + j] for j in range(dim)] for i in range(dim)]
        field = TensorField.from_arrays(grid, mats, time)
    return field, ext, pos


def read_field(path):
    """Read exactly one field record; trailing bytes are an error."""
    buf = _read_bytes(path)
    field, ext, pos = _read_record(buf, 0)
    if ext is not None:
        raise FormatError("kernel-cache record where a plain field was expected", 0)
    if pos != len(buf):
        raise FormatError(f"{len(buf) - pos} trailing bytes after record", pos)
    return field


def read_series(path) -> TimeSeriesField:
    """Read back-to-back records until EOF as a time series."""
    buf = _read_bytes(path)
    frames = []
    pos = 0
    while pos < len(buf):
        field, ext, pos = _read_record(buf, pos)
        if ext is not None:
            raise FormatError("kernel-cache record inside a series", pos)
        frames.append(field)
    return TimeSeriesField(tuple(frames))


def _read_bytes(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


# kernel-table caching (version-2 records) -----------------------------------

def pack_index(index) -> int:
    out = 0
    for k in index:
        if not 0 <= int(k) < 16:
            raise FormatError(f"index component {k} out of range")
        out = out * 16 + int(k)
    return out


def unpack_index(packed: int, arity: int):
    out = []
    for _ in range(arity):
        out.append(packed % 16)
        packed //= 16
    return tuple(reversed(out))


def write_kernel_table(path, values: ScalarField, kernel_id: int, index):
    ext = _EXT.pack(int(kernel_id), pack_index(index))
    with open(path, "wb") as fh:
        fh.write(_encode(values, version=2, extension=ext))


def read_kernel_table(path, arity: int = 2):
    buf = _read_bytes(path)
    field, ext, pos = _read_record(buf, 0)
    if ext is None:
        raise FormatError("plain field record where a kernel cache was expected", 0)
    if pos != len(buf):
        raise FormatError(f"{len(buf) - pos} trailing bytes after record", pos)
    kernel_id, packed = ext
    return field, kernel_id, unpack_index(packed, arity)
