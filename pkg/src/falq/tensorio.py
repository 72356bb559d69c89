"""Tensor file I/O: the FATF tensor format and the FALQ compressed container.

Both formats are little-endian throughout and documented with byte-offset
tables in docs/formats.md. Serialization is bit-exact: parse(serialize(x))
reproduces every field and every payload bit.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import FormatError, ParamError

TENSOR_MAGIC = b"FATF"
CONTAINER_MAGIC = b"FALQ"
TENSOR_VERSION = 1
CONTAINER_VERSION = 1

# dtype_code -> little-endian numpy dtype
_DTYPES = {0: "<f8", 1: "<f4", 2: "<c8", 3: "<c16"}
_CODES = {np.dtype(d): c for c, d in _DTYPES.items()}

_TENSOR_HEAD = struct.Struct("<4sHBB")
_CONTAINER_HEAD = struct.Struct("<4sHBBQQQQdQQQ")

MAX_BITWIDTH = 16


def _storage_dtype(arr: np.ndarray) -> np.dtype:
    if arr.dtype in _CODES:
        return arr.dtype
    if np.issubdtype(arr.dtype, np.complexfloating):
        return np.dtype("<c16")
    if np.issubdtype(arr.dtype, np.number) or arr.dtype == np.bool_:
        return np.dtype("<f8")
    raise ParamError(f"unsupported tensor dtype {arr.dtype}")


def write_tensor(path, matrix) -> None:
    """Write a 1-D or 2-D real/complex array as a FATF file."""
    arr = np.asarray(matrix)
    if arr.ndim not in (1, 2):
        raise ParamError(f"FATF stores 1-D or 2-D tensors, got ndim={arr.ndim}")
    if any(d == 0 for d in arr.shape):
        raise ParamError(f"zero-sized dimension in shape {arr.shape}")
    dtype = _storage_dtype(arr)
    arr = np.ascontiguousarray(arr, dtype=dtype)
    head = _TENSOR_HEAD.pack(TENSOR_MAGIC, TENSOR_VERSION, _CODES[dtype], arr.ndim)
    dims = b"".join(struct.pack("<Q", d) for d in arr.shape)
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(dims)
        fh.write(arr.tobytes(order="C"))


def read_tensor(path) -> np.ndarray:
    """Read a FATF file back into a numpy array with its recorded dtype."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _TENSOR_HEAD.size:
        raise FormatError("truncated FATF header")
    magic, version, code, ndim = _TENSOR_HEAD.unpack_from(data)
    if magic != TENSOR_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {TENSOR_MAGIC!r}")
    if version > TENSOR_VERSION:
        raise FormatError(f"unsupported FATF version {version}")
    if code not in _DTYPES:
        raise FormatError(f"unsupported dtype_code {code}")
    if ndim not in (1, 2):
        raise FormatError(f"FATF ndim must be 1 or 2, got {ndim}")
    off = _TENSOR_HEAD.size
    if len(data) < off + 8 * ndim:
        raise FormatError("truncated FATF dims")
    dims = struct.unpack_from(f"<{ndim}Q", data, off)
    off += 8 * ndim
    if any(d == 0 for d in dims):
        raise FormatError(f"zero-sized dimension in {dims}")
    dtype = np.dtype(_DTYPES[code])
    expected = int(np.prod([int(d) for d in dims], dtype=object)) * dtype.itemsize
    if len(data) - off != expected:
        raise FormatError(
            f"payload length {len(data) - off} != expected {expected} bytes"
        )
    return np.frombuffer(data, dtype=dtype, offset=off).reshape(dims).copy()


def pack_bits(indices, bitwidth: int) -> bytes:
    """Pack unsigned integers into a dense LSB-first bitstream.

    Packed length is ceil(len(indices) * bitwidth / 8) bytes.
    """
    if not 1 <= bitwidth <= MAX_BITWIDTH:
        raise ParamError(f"bitwidth must be in 1..{MAX_BITWIDTH}, got {bitwidth}")
    arr = np.asarray(indices)
    if arr.size:
        lo = int(arr.min())
        hi = int(arr.max())
        if lo < 0 or hi >= (1 << bitwidth):
            raise ParamError(
                f"index out of range for {bitwidth}-bit packing: [{lo}, {hi}]"
            )
    arr = np.ascontiguousarray(arr, dtype=np.uint32).ravel()
    return kernels.pack_bits(arr, bitwidth)


def unpack_bits(data: bytes, bitwidth: int, count: int) -> np.ndarray:
    """Inverse of pack_bits; returns a uint32 array of length ``count``."""
    if not 1 <= bitwidth <= MAX_BITWIDTH:
        raise ParamError(f"bitwidth must be in 1..{MAX_BITWIDTH}, got {bitwidth}")
    if count < 0:
        raise ParamError(f"count must be >= 0, got {count}")
    expected = (count * bitwidth + 7) // 8
    if len(data) != expected:
        raise FormatError(
            f"bitstream of {len(data)} bytes, expected {expected} "
            f"for {count} x {bitwidth}-bit indices"
        )
    return kernels.unpack_bits(data, bitwidth, count)


def packed_nbytes(count: int, bitwidth: int) -> int:
    return (count * bitwidth + 7) // 8


@dataclass
class CompressedContainer:
    """Parsed FALQ container.

    ``d2`` is the true (possibly odd) width of the original matrix; the half
    spectrum was computed on the zero-padded even width, so ``c`` equals
    (d2 + d2 % 2) // 2 + 1. Factors are stored as complex64; index streams
    are packed row-major. ``metadata`` is free-form JSON that the numeric
    decode path never reads.
    """

    d1: int
    d2: int
    c: int
    rank: int
    amp_bits: int
    phase_bits: int
    max_amp: float
    left: np.ndarray
    right: np.ndarray
    amp_stream: bytes
    phase_stream: bytes
    metadata: dict | None = field(default=None)

    def __post_init__(self):
        expected_c = (self.d2 + self.d2 % 2) // 2 + 1
        if self.c != expected_c:
            raise FormatError(f"c={self.c} inconsistent with d2={self.d2}")
        n = self.d1 * self.c
        if len(self.amp_stream) != packed_nbytes(n, self.amp_bits):
            raise FormatError("amplitude bitstream length mismatch")
        if len(self.phase_stream) != packed_nbytes(n, self.phase_bits):
            raise FormatError("phase bitstream length mismatch")
        if self.left.shape != (self.d1, self.rank):
            raise FormatError(f"left factor shape {self.left.shape}")
        if self.right.shape != (self.rank, self.c):
            raise FormatError(f"right factor shape {self.right.shape}")

    @property
    def header_nbytes(self) -> int:
        return _CONTAINER_HEAD.size


def serialize_container(cont: CompressedContainer) -> bytes:
    meta = b""
    if cont.metadata is not None:
        meta = json.dumps(cont.metadata, sort_keys=True).encode("utf-8")
    left = np.ascontiguousarray(cont.left, dtype="<c8")
    right = np.ascontiguousarray(cont.right, dtype="<c8")
    head = _CONTAINER_HEAD.pack(
        CONTAINER_MAGIC,
        CONTAINER_VERSION,
        cont.amp_bits,
        cont.phase_bits,
        cont.d1,
        cont.d2,
        cont.c,
        cont.rank,
        cont.max_amp,
        len(cont.amp_stream),
        len(cont.phase_stream),
        len(meta),
    )
    return b"".join(
        [head, left.tobytes("C"), right.tobytes("C"),
         cont.amp_stream, cont.phase_stream, meta]
    )


def parse_container(data: bytes) -> CompressedContainer:
    if len(data) < _CONTAINER_HEAD.size:
        raise FormatError("truncated FALQ header")
    (magic, version, amp_bits, phase_bits, d1, d2, c, rank, max_amp,
     n_amp, n_phase, n_meta) = _CONTAINER_HEAD.unpack_from(data)
    if magic != CONTAINER_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {CONTAINER_MAGIC!r}")
    if version > CONTAINER_VERSION:
        raise FormatError(f"unsupported FALQ version {version}")
    off = _CONTAINER_HEAD.size
    itemsize = np.dtype("<c8").itemsize
    n_left = d1 * rank * itemsize
    n_right = rank * c * itemsize
    total = off + n_left + n_right + n_amp + n_phase + n_meta
    if len(data) != total:
        raise FormatError(f"container of {len(data)} bytes, expected {total}")
    left = np.frombuffer(data, "<c8", d1 * rank, off).reshape(d1, rank).copy()
    off += n_left
    right = np.frombuffer(data, "<c8", rank * c, off).reshape(rank, c).copy()
    off += n_right
    amp_stream = data[off:off + n_amp]
    off += n_amp
    phase_stream = data[off:off + n_phase]
    off += n_phase
    metadata = None
    if n_meta:
        try:
            metadata = json.loads(data[off:off + n_meta].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"corrupt metadata block: {exc}") from exc
    return CompressedContainer(
        d1=d1, d2=d2, c=c, rank=rank,
        amp_bits=amp_bits, phase_bits=phase_bits, max_amp=max_amp,
        left=left, right=right,
        amp_stream=amp_stream, phase_stream=phase_stream,
        metadata=metadata,
    )


def write_container(path, cont: CompressedContainer) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_container(cont))


def read_container(path) -> CompressedContainer:
    with open(path, "rb") as fh:
        return parse_container(fh.read())
