"""Pure-numpy bit packing fallback.

Same contract as the compiled kernel: bytes are filled LSB-first, element 0
occupies the lowest-order bits of the stream. Inputs are assumed validated
by the caller (falq.tensorio).
"""

import numpy as np


def pack_bits(indices: np.ndarray, bitwidth: int) -> bytes:
    if indices.size == 0:
        return b""
    shifts = np.arange(bitwidth, dtype=np.uint32)
    bits = ((indices[:, None] >> shifts) & np.uint32(1)).astype(np.uint8)
    return np.packbits(bits.ravel(), bitorder="little").tobytes()


def unpack_bits(data: bytes, bitwidth: int, count: int) -> np.ndarray:
    if count == 0:
        return np.zeros(0, dtype=np.uint32)
    raw = np.frombuffer(data, dtype=np.uint8)
    bits = np.unpackbits(raw, count=count * bitwidth, bitorder="little")
    bits = bits.reshape(count, bitwidth).astype(np.uint32)
    weights = np.uint32(1) << np.arange(bitwidth, dtype=np.uint32)
    return (bits * weights).sum(axis=1, dtype=np.uint32)
