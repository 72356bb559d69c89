"""Both bit-packing backends implement one contract."""

import numpy as np
import pytest

from falq.kernels import BACKEND, available_backends


def test_some_backend_selected():
    assert BACKEND in ("cython", "numpy")


def test_backends_agree():
    backends = available_backends()
    if len(backends) < 2:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(0)
    for bitwidth in (1, 3, 4, 8, 11, 16):
        for n in (0, 1, 5, 63, 64, 1000):
            idx = rng.integers(0, 2**bitwidth, size=n).astype(np.uint32)
            packed = {name: mod.pack_bits(idx, bitwidth) for name, mod in backends.items()}
            assert packed["cython"] == packed["numpy"], (bitwidth, n)
            for mod in backends.values():
                np.testing.assert_array_equal(
                    mod.unpack_bits(packed["numpy"], bitwidth, n), idx
                )


def test_packed_size():
    for name, mod in available_backends().items():
        idx = np.arange(9, dtype=np.uint32) % 8
        assert len(mod.pack_bits(idx, 3)) == (9 * 3 + 7) // 8, name
