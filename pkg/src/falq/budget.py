"""Bit-budget arithmetic: average bits per parameter, the rank-feasibility
threshold, and achieved compression ratios of FALQ containers.

``average_bits`` and ``rank_threshold`` use the idealized spatial-domain
parameter counting (a rank costs factor_bits * (d1 + d2) per layer);
``container_ratio`` reports the true frequency-domain storage cost of a
container side by side, so both views stay visible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParamError
from .tensorio import CompressedContainer


@dataclass
class BudgetConfig:
    """Backbone bits per entry, factor bits per scalar, and kept rank."""

    backbone_bits: float
    factor_bits: float
    rank: int

    def __post_init__(self):
        if not 0 < self.backbone_bits < self.factor_bits:
            raise ParamError(
                f"need 0 < backbone_bits < factor_bits, got "
                f"{self.backbone_bits}, {self.factor_bits}"
            )
        if self.rank < 0:
            raise ParamError(f"rank must be >= 0, got {self.rank}")


def _check_dims(dims) -> list[tuple[int, int]]:
    out = [(int(a), int(b)) for a, b in dims]
    if not out:
        raise ParamError("empty layer dims")
    if any(a < 1 or b < 1 for a, b in out):
        raise ParamError(f"all dims must be >= 1: {out}")
    return out


def average_bits(dims, cfg: BudgetConfig) -> float:
    """Average stored bits per original parameter over a block of layers:
    sum_i (B_Q d1 d2 + k B_L (d1 + d2)) / sum_i d1 d2."""
    dims = _check_dims(dims)
    entries = sum(a * b for a, b in dims)
    factor_rows = sum(a + b for a, b in dims)
    total = cfg.backbone_bits * entries + cfg.rank * cfg.factor_bits * factor_rows
    return total / entries


def rank_threshold(dims, backbone_bits: float, factor_bits: float) -> float:
    """Rank below which average_bits stays under factor_bits:
    (1 - B_Q/B_L) * sum d1 d2 / sum (d1 + d2)."""
    if not 0 < backbone_bits < factor_bits:
        raise ParamError(
            f"need 0 < backbone_bits < factor_bits, got {backbone_bits}, "
            f"{factor_bits}"
        )
    dims = _check_dims(dims)
    entries = sum(a * b for a, b in dims)
    factor_rows = sum(a + b for a, b in dims)
    return (1.0 - backbone_bits / factor_bits) * entries / factor_rows


# Stored factor scalars are complex64: two 32-bit reals per complex entry.
FACTOR_BITS_PER_COMPLEX = 64
_HEADER_BITS = 72 * 8  # fixed FALQ header, including the max_amp scale


def container_bits(
    cont: CompressedContainer, include_header: bool = True
) -> dict:
    stream_bits = 8 * (len(cont.amp_stream) + len(cont.phase_stream))
    factor_bits = FACTOR_BITS_PER_COMPLEX * (
        cont.d1 * cont.rank + cont.rank * cont.c
    )
    total = stream_bits + factor_bits + (_HEADER_BITS if include_header else 0)
    return {
        "stream_bits": stream_bits,
        "factor_bits": factor_bits,
        "header_bits": _HEADER_BITS if include_header else 0,
        "compressed_bits": total,
    }


def container_ratio(
    cont: CompressedContainer,
    original_bits_per_scalar: int = 32,
    include_header: bool = True,
) -> dict:
    """Achieved compression of a container against the original matrix.

    ``stored_scalar_fraction`` counts the naive real-pair storage of the
    half spectrum (2c/d2 of the original scalar count, slightly above 1).
    ``coeff_fraction`` counts stored complex coefficients per original real
    scalar (c/d2): it exceeds 1/2 by 1/d2 because the DC and Nyquist
    columns are both kept. The optional metadata block is excluded; it is
    debugging info the decoder never reads.
    """
    bits = container_bits(cont, include_header=include_header)
    original_bits = cont.d1 * cont.d2 * original_bits_per_scalar
    compressed = bits["compressed_bits"]
    pad_d2 = cont.d2 + cont.d2 % 2
    return {
        **bits,
        "original_bits": original_bits,
        "ratio": original_bits / compressed,
        "stored_scalar_fraction": 2.0 * cont.c / pad_d2,
        "coeff_fraction": cont.c / pad_d2,
    }


def break_even_rank(
    d1: int,
    d2: int,
    amp_bits: int,
    phase_bits: int,
    original_bits_per_scalar: int = 32,
    include_header: bool = True,
) -> float:
    """Rank at which container_ratio crosses 1: ranks strictly below give
    ratio > 1, assuming amp_bits + phase_bits < original_bits_per_scalar."""
    c = (d2 + d2 % 2) // 2 + 1
    n = d1 * c
    stream_bits = 8 * ((n * amp_bits + 7) // 8 + (n * phase_bits + 7) // 8)
    header = _HEADER_BITS if include_header else 0
    numer = d1 * d2 * original_bits_per_scalar - stream_bits - header
    denom = FACTOR_BITS_PER_COMPLEX * (d1 + c)
    return numer / denom
