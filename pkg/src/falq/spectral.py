"""Real <-> complex 2-D DFT with conjugate-symmetry reduction.

Convention: unnormalized forward transform, 1/(d1*d2)-scaled inverse. For a
real d1 x d2 input the full spectrum satisfies F[u, v] == conj(F[-u, -v])
(indices mod dims), so only the d1 x (d2/2 + 1) left block is stored. The
DC column and (for even d2) the Nyquist column carry that symmetry
internally along rows; in particular their row-0 entries are real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParamError, SymmetryError

# Max allowed DC/Nyquist asymmetry, relative to the spectrum max-norm.
DC_NYQUIST_TOL = 1e-8


@dataclass
class HalfSpectrum:
    """Conjugate-symmetry-reduced spectrum of a real d1 x d2 matrix."""

    d1: int
    d2: int
    data: np.ndarray
    norm_convention: str = "unnormalized-forward"
    orig_d2: int | None = None  # pre-padding width when an odd input was padded

    def __post_init__(self):
        if self.d2 % 2 != 0 or self.d2 < 2:
            raise ParamError(f"HalfSpectrum needs even d2 >= 2, got {self.d2}")
        expected = (self.d1, self.d2 // 2 + 1)
        if self.data.shape != expected:
            raise ParamError(
                f"half spectrum shape {self.data.shape}, expected {expected}"
            )

    @property
    def c(self) -> int:
        return self.d2 // 2 + 1


def _row_mirror(col: np.ndarray) -> np.ndarray:
    """Return m[u] = col[(n - u) % n]."""
    return np.roll(col[::-1], 1, axis=0)


def dc_nyquist_deviation(data: np.ndarray) -> float:
    """Max |x - conj(mirror)| over the DC and Nyquist columns."""
    dev = float(np.abs(data[:, 0] - np.conj(_row_mirror(data[:, 0]))).max())
    dev = max(dev, float(np.abs(data[:, -1] - np.conj(_row_mirror(data[:, -1]))).max()))
    return dev


def project_real_representable(data: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) half spectrum whose DC/Nyquist columns are exactly
    conjugate-symmetric; interior columns pass through unchanged."""
    out = np.array(data, dtype=np.complex128, copy=True)
    for j in (0, out.shape[1] - 1):
        col = out[:, j]
        out[:, j] = (col + np.conj(_row_mirror(col))) / 2.0
    return out


def forward_dft2(W, strict: bool = True) -> HalfSpectrum:
    """Unnormalized forward 2-D DFT of a real matrix, reduced to a half
    spectrum. Odd widths are rejected unless strict=False, which zero-pads
    one column and records the original width."""
    arr = np.asarray(W, dtype=np.float64)
    if arr.ndim != 2:
        raise ParamError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    d1, d2 = arr.shape
    if d1 < 1 or d2 < 2:
        raise ParamError(f"need d1 >= 1 and d2 >= 2, got {arr.shape}")
    orig_d2 = None
    if d2 % 2 != 0:
        if strict:
            raise ParamError(f"odd d2={d2} rejected in strict mode")
        orig_d2 = d2
        arr = np.pad(arr, ((0, 0), (0, 1)))
        d2 += 1
    return HalfSpectrum(d1=d1, d2=d2, data=np.fft.rfft2(arr), orig_d2=orig_d2)


def expand_full(spectrum: HalfSpectrum) -> np.ndarray:
    """Rebuild the full d1 x d2 spectrum from a half spectrum. Columns
    0..c-1 equal the stored data; the rest are filled by conjugate symmetry
    so those pairs match exactly by construction."""
    d1, d2 = spectrum.d1, spectrum.d2
    c = spectrum.c
    full = np.zeros((d1, d2), dtype=np.complex128)
    full[:, :c] = spectrum.data
    for v in range(1, c - 1):
        full[:, d2 - v] = np.conj(_row_mirror(spectrum.data[:, v]))
    return full


def inverse_dft2(spectrum: HalfSpectrum) -> np.ndarray:
    """Inverse transform back to a real matrix (1/(d1*d2) scaling).

    Raises SymmetryError when the DC/Nyquist invariants are violated beyond
    DC_NYQUIST_TOL relative to the spectrum max-norm, which signals a
    corrupted spectrum. The imaginary residual of the complex inverse is
    checked against 1e-10 * ||W||_F and then discarded.
    """
    scale = float(np.abs(spectrum.data).max())
    dev = dc_nyquist_deviation(spectrum.data)
    if scale > 0 and dev > DC_NYQUIST_TOL * scale:
        raise SymmetryError(
            f"DC/Nyquist asymmetry {dev:.3e} exceeds {DC_NYQUIST_TOL:.0e} "
            f"* max|spectrum| {scale:.3e}"
        )
    out = np.fft.ifft2(expand_full(spectrum))
    real = np.ascontiguousarray(out.real)
    imag_norm = float(np.linalg.norm(out.imag))
    real_norm = float(np.linalg.norm(real))
    if real_norm > 0 and imag_norm > 1e-10 * real_norm:
        raise SymmetryError(
            f"imaginary residual {imag_norm:.3e} exceeds 1e-10 * ||W||"
        )
    if spectrum.orig_d2 is not None:
        real = real[:, : spectrum.orig_d2]
    return real


def check_conjugate_symmetry(F) -> float:
    """Max over (u, v) of |F[u, v] - conj(F[(M-u) % M, (N-v) % N])|."""
    arr = np.asarray(F, dtype=np.complex128)
    if arr.ndim != 2:
        raise ParamError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    mirrored = np.roll(arr[::-1, ::-1], (1, 1), axis=(0, 1))
    return float(np.abs(arr - np.conj(mirrored)).max())
