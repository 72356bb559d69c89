"""falq: frequency-domain low-rank plus polar-quantized matrix compression.

A real weight matrix is mapped to its conjugate-symmetry-reduced half
spectrum, split into rank-r complex factors plus a polar-quantized residual
by an alternating loop, and stored bit-exactly in the FALQ container
format. See docs/formats.md for the file formats and README.md for usage.
"""

from .bench import (
    DomainReport,
    StationaryFieldSpec,
    compare_domains,
    domain_experiment,
    gen_stationary_field,
    quantizer_ablation,
    tail_ratio_check,
)
from .budget import (
    BudgetConfig,
    average_bits,
    break_even_rank,
    container_ratio,
    rank_threshold,
)
from .csvd import (
    ComplexSVD,
    LowRankFactors,
    complex_svd,
    min_rank_for_error,
    truncate_factors,
    truncation_error,
)
from .decompose import (
    CalibrationMatrix,
    FADecomposition,
    build_calibration,
    calibration_from_moments,
    compress,
    epsilon_dominance,
    fa_decompose,
    odc_decompose,
    reconstruct_from_container,
    reconstruct_spatial,
    to_container,
    weighted_error,
)
from .errors import FalqError, FormatError, NumericError, ParamError, SymmetryError
from .kernels import BACKEND as KERNEL_BACKEND
from .polarquant import (
    PolarCode,
    phase_error_stats,
    polar_dequantize,
    polar_quantize,
    qim_quantize,
)
from .spectral import (
    HalfSpectrum,
    check_conjugate_symmetry,
    expand_full,
    forward_dft2,
    inverse_dft2,
)
from .tensorio import (
    CompressedContainer,
    pack_bits,
    parse_container,
    read_container,
    read_tensor,
    serialize_container,
    unpack_bits,
    write_container,
    write_tensor,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetConfig",
    "CalibrationMatrix",
    "ComplexSVD",
    "CompressedContainer",
    "DomainReport",
    "FADecomposition",
    "FalqError",
    "FormatError",
    "HalfSpectrum",
    "KERNEL_BACKEND",
    "LowRankFactors",
    "NumericError",
    "ParamError",
    "PolarCode",
    "StationaryFieldSpec",
    "SymmetryError",
    "average_bits",
    "break_even_rank",
    "build_calibration",
    "calibration_from_moments",
    "check_conjugate_symmetry",
    "compare_domains",
    "complex_svd",
    "compress",
    "container_ratio",
    "domain_experiment",
    "epsilon_dominance",
    "expand_full",
    "fa_decompose",
    "forward_dft2",
    "gen_stationary_field",
    "inverse_dft2",
    "min_rank_for_error",
    "odc_decompose",
    "pack_bits",
    "parse_container",
    "phase_error_stats",
    "polar_dequantize",
    "polar_quantize",
    "qim_quantize",
    "quantizer_ablation",
    "rank_threshold",
    "read_container",
    "read_tensor",
    "reconstruct_from_container",
    "reconstruct_spatial",
    "serialize_container",
    "tail_ratio_check",
    "to_container",
    "truncate_factors",
    "truncation_error",
    "unpack_bits",
    "weighted_error",
    "write_container",
    "write_tensor",
]
