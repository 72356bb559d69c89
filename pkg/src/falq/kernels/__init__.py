"""Hot bit-packing kernels with a compiled core and a numpy fallback.

The compiled Cython module is preferred when present; set FALQ_KERNELS=numpy
to force the fallback (used by the benchmark and by tests that exercise both
paths). Both implementations share one contract, documented in
docs/formats.md: LSB-first bit order within bytes, row-major element order.
"""

import os

from . import _bitpack_py

try:
    from . import _bitpack_cy
except ImportError:
    _bitpack_cy = None

if os.environ.get("FALQ_KERNELS") == "numpy" or _bitpack_cy is None:
    _active = _bitpack_py
    BACKEND = "numpy"
else:
    _active = _bitpack_cy
    BACKEND = "cython"

pack_bits = _active.pack_bits
unpack_bits = _active.unpack_bits


def available_backends():
    """Map backend name -> module, for benchmarks and dual-path tests."""
    backends = {"numpy": _bitpack_py}
    if _bitpack_cy is not None:
        backends["cython"] = _bitpack_cy
    return backends
