# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bit-packing kernel.

Bytes are filled LSB-first; element 0 occupies the lowest-order bits of the
stream. Inputs are assumed validated by the caller (falq.tensorio).
"""

from libc.stdint cimport uint8_t, uint32_t, uint64_t

import numpy as np


def pack_bits(const uint32_t[::1] indices, int bitwidth):
    cdef Py_ssize_t n = indices.shape[0]
    cdef Py_ssize_t nbytes = (n * bitwidth + 7) // 8
    out = np.zeros(nbytes, dtype=np.uint8)
    if n == 0:
        return b""
    cdef uint8_t[::1] buf = out
    cdef uint64_t acc = 0
    cdef int filled = 0
    cdef Py_ssize_t i, pos = 0
    for i in range(n):
        acc |= (<uint64_t> indices[i]) << filled
        filled += bitwidth
        while filled >= 8:
            buf[pos] = <uint8_t> (acc & 0xFF)
            acc >>= 8
            filled -= 8
            pos += 1
    if filled > 0:
        buf[pos] = <uint8_t> (acc & 0xFF)
    return out.tobytes()


def unpack_bits(const uint8_t[::1] data, int bitwidth, Py_ssize_t count):
    out = np.zeros(count, dtype=np.uint32)
    if count == 0:
        return out
    cdef uint32_t[::1] res = out
    cdef uint64_t acc = 0
    cdef int filled = 0
    cdef uint64_t mask = (<uint64_t> 1 << bitwidth) - 1
    cdef Py_ssize_t i, pos = 0
    for i in range(count):
        while filled < bitwidth:
            acc |= (<uint64_t> data[pos]) << filled
            filled += 8
            pos += 1
        res[i] = <uint32_t> (acc & mask)
        acc >>= bitwidth
        filled -= bitwidth
    return out
