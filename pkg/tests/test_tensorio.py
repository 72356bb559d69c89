"""FATF tensor files, bit packing, and the FALQ container."""

import numpy as np
import pytest

from falq.errors import FormatError, ParamError
from falq.tensorio import (
    CompressedContainer,
    pack_bits,
    packed_nbytes,
    parse_container,
    read_tensor,
    serialize_container,
    unpack_bits,
    write_tensor,
)


class TestTensorFile:
    def test_single_scalar_roundtrip(self, tmp_path):
        path = tmp_path / "one.fatf"
        write_tensor(path, np.array([[0.0]]))
        out = read_tensor(path)
        assert out.shape == (1, 1)
        assert out[0, 0] == 0.0

    def test_payload_size_2x3_float64(self, tmp_path):
        path = tmp_path / "m.fatf"
        write_tensor(path, np.arange(6, dtype=np.float64).reshape(2, 3))
        # header 8 + two u64 dims + 6 * 8 payload bytes
        assert path.stat().st_size == 8 + 16 + 48

    def test_roundtrip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        W = rng.standard_normal((64, 64))
        path = tmp_path / "w.fatf"
        write_tensor(path, W)
        out = read_tensor(path)
        assert out.dtype == np.float64
        assert out.tobytes() == W.tobytes()

    @pytest.mark.parametrize("dtype", [np.float32, np.complex64, np.complex128])
    def test_dtype_roundtrips(self, tmp_path, dtype):
        rng = np.random.default_rng(1)
        base = rng.standard_normal((5, 4))
        if np.issubdtype(dtype, np.complexfloating):
            base = base + 1j * rng.standard_normal((5, 4))
        arr = base.astype(dtype)
        path = tmp_path / "t.fatf"
        write_tensor(path, arr)
        out = read_tensor(path)
        assert out.dtype == np.dtype(dtype)
        assert out.tobytes() == np.ascontiguousarray(arr).tobytes()

    def test_1d_roundtrip(self, tmp_path):
        path = tmp_path / "v.fatf"
        write_tensor(path, np.array([1.5, -2.5, 3.0]))
        np.testing.assert_array_equal(read_tensor(path), [1.5, -2.5, 3.0])

    def test_int_input_stored_as_float64(self, tmp_path):
        path = tmp_path / "i.fatf"
        write_tensor(path, np.array([[1, 2], [3, 4]]))
        out = read_tensor(path)
        assert out.dtype == np.float64
        np.testing.assert_array_equal(out, [[1.0, 2.0], [3.0, 4.0]])

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.fatf"
        write_tensor(path, np.zeros((2, 2)))
        data = bytearray(path.read_bytes())
        data[:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError, match="magic"):
            read_tensor(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "trunc.fatf"
        write_tensor(path, np.zeros((2, 2)))
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(FormatError, match="payload"):
            read_tensor(path)

    def test_unknown_dtype_code(self, tmp_path):
        path = tmp_path / "code.fatf"
        write_tensor(path, np.zeros((2, 2)))
        data = bytearray(path.read_bytes())
        data[6] = 200
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError, match="dtype_code"):
            read_tensor(path)

    def test_rejects_bad_shapes(self, tmp_path):
        with pytest.raises(ParamError):
            write_tensor(tmp_path / "x", np.zeros((2, 2, 2)))
        with pytest.raises(ParamError):
            write_tensor(tmp_path / "y", np.zeros((0, 3)))


class TestBitPacking:
    def test_worked_example(self):
        packed = pack_bits([15, 0, 7], 4)
        assert packed == b"\x0f\x07"
        np.testing.assert_array_equal(unpack_bits(packed, 4, 3), [15, 0, 7])

    def test_empty(self):
        assert pack_bits([], 7) == b""
        assert unpack_bits(b"", 7, 0).size == 0

    def test_1000_random_5bit(self):
        rng = np.random.default_rng(2)
        idx = rng.integers(0, 32, size=1000)
        packed = pack_bits(idx, 5)
        assert len(packed) == 625
        np.testing.assert_array_equal(unpack_bits(packed, 5, 1000), idx)

    @pytest.mark.parametrize("bitwidth", range(1, 17))
    def test_roundtrip_all_widths(self, bitwidth):
        rng = np.random.default_rng(bitwidth)
        for n in (1, 7, 8, 64, 129):
            idx = rng.integers(0, 2**bitwidth, size=n)
            packed = pack_bits(idx, bitwidth)
            assert len(packed) == packed_nbytes(n, bitwidth)
            np.testing.assert_array_equal(unpack_bits(packed, bitwidth, n), idx)

    def test_index_out_of_range(self):
        with pytest.raises(ParamError, match="out of range"):
            pack_bits([16], 4)
        with pytest.raises(ParamError, match="out of range"):
            pack_bits([-1], 4)

    def test_bitwidth_bounds(self):
        with pytest.raises(ParamError):
            pack_bits([0], 0)
        with pytest.raises(ParamError):
            pack_bits([0], 17)

    def test_unpack_length_check(self):
        with pytest.raises(FormatError):
            unpack_bits(b"\x00", 4, 3)


def _sample_container(metadata=None):
    rng = np.random.default_rng(3)
    d1, d2, rank = 6, 8, 2
    c = d2 // 2 + 1
    n = d1 * c
    return CompressedContainer(
        d1=d1, d2=d2, c=c, rank=rank, amp_bits=4, phase_bits=5,
        max_amp=1.25,
        left=(rng.standard_normal((d1, rank)) + 1j * rng.standard_normal((d1, rank))).astype(np.complex64),
        right=(rng.standard_normal((rank, c)) + 1j * rng.standard_normal((rank, c))).astype(np.complex64),
        amp_stream=pack_bits(rng.integers(0, 16, n), 4),
        phase_stream=pack_bits(rng.integers(0, 32, n), 5),
        metadata=metadata,
    )


class TestContainer:
    def test_roundtrip_every_field(self):
        cont = _sample_container(metadata={"source": "unit", "error_trace": [1.0, 0.5]})
        out = parse_container(serialize_container(cont))
        assert (out.d1, out.d2, out.c, out.rank) == (cont.d1, cont.d2, cont.c, cont.rank)
        assert (out.amp_bits, out.phase_bits) == (cont.amp_bits, cont.phase_bits)
        assert out.max_amp == cont.max_amp
        assert out.left.tobytes() == cont.left.tobytes()
        assert out.right.tobytes() == cont.right.tobytes()
        assert out.amp_stream == cont.amp_stream
        assert out.phase_stream == cont.phase_stream
        assert out.metadata == cont.metadata

    def test_serialize_is_deterministic(self):
        a = serialize_container(_sample_container(metadata={"k": 1}))
        b = serialize_container(_sample_container(metadata={"k": 1}))
        assert a == b

    def test_no_metadata(self):
        out = parse_container(serialize_container(_sample_container()))
        assert out.metadata is None

    def test_bad_magic(self):
        data = bytearray(serialize_container(_sample_container()))
        data[:4] = b"NOPE"
        with pytest.raises(FormatError, match="magic"):
            parse_container(bytes(data))

    def test_truncated(self):
        data = serialize_container(_sample_container())
        with pytest.raises(FormatError):
            parse_container(data[:-3])

    def test_stream_length_invariant(self):
        cont = _sample_container()
        with pytest.raises(FormatError, match="amplitude bitstream"):
            CompressedContainer(
                d1=cont.d1, d2=cont.d2, c=cont.c, rank=cont.rank,
                amp_bits=cont.amp_bits, phase_bits=cont.phase_bits,
                max_amp=cont.max_amp, left=cont.left, right=cont.right,
                amp_stream=cont.amp_stream + b"\x00",
                phase_stream=cont.phase_stream,
            )

    def test_c_consistency_checked(self):
        cont = _sample_container()
        with pytest.raises(FormatError, match="inconsistent"):
            CompressedContainer(
                d1=cont.d1, d2=cont.d2, c=cont.c + 1, rank=cont.rank,
                amp_bits=cont.amp_bits, phase_bits=cont.phase_bits,
                max_amp=cont.max_amp, left=cont.left, right=cont.right,
                amp_stream=cont.amp_stream, phase_stream=cont.phase_stream,
            )
