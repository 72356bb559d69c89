"""Complex SVD, rank-r truncation into factor pairs, and singular-spectrum
analytics.

The SVD is computed from the Hermitian eigendecomposition of the smaller
Gram matrix. Output phases are pinned by making the largest-modulus entry of
each right singular vector real-positive, so repeated calls are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParamError

# Singular values below ZERO_TOL * sigma_max are reported as exactly zero and
# their singular vectors completed orthogonally. The Gram route cannot
# resolve sigma below ~sqrt(eps) * sigma_max (squaring halves the precision),
# so the floor sits a safety factor above that level.
ZERO_TOL = 32.0 * float(np.sqrt(np.finfo(np.float64).eps))


@dataclass
class ComplexSVD:
    """Economy SVD R = U @ diag(S) @ Vh with k = min(d1, c) columns."""

    U: np.ndarray
    S: np.ndarray
    Vh: np.ndarray


@dataclass
class LowRankFactors:
    """Balanced rank-r factor pair: L1 = U_r sqrt(S_r), L2 = sqrt(S_r) Vh_r."""

    left: np.ndarray
    right: np.ndarray
    rank: int
    kept_singular_values: np.ndarray

    def product(self) -> np.ndarray:
        return self.left @ self.right


def _complete_columns(Q: np.ndarray, filled: np.ndarray) -> np.ndarray:
    """Fill unfilled columns with deterministic orthonormal complements,
    built from standard basis vectors by twice-repeated Gram-Schmidt."""
    m = Q.shape[0]
    e = 0
    for j in np.where(~filled)[0]:
        while True:
            if e >= 2 * m:  # cannot happen for consistent inputs
                raise NumericError("failed to complete an orthonormal basis")
            v = np.zeros(m, dtype=Q.dtype)
            v[e % m] = 1.0
            e += 1
            for _ in range(2):
                v -= Q[:, filled] @ (Q[:, filled].conj().T @ v)
            norm = np.linalg.norm(v)
            if norm > 0.1:
                Q[:, j] = v / norm
                filled[j] = True
                break
    return Q


def _pin_phases(U: np.ndarray, V: np.ndarray):
    """Rotate each (U_j, V_j) pair so the largest-modulus entry of V_j is
    real-positive. Keeps U diag(S) Vh invariant."""
    k = V.shape[1]
    idx = np.argmax(np.abs(V), axis=0)
    pivot = V[idx, np.arange(k)]
    mag = np.abs(pivot)
    phase = np.where(mag > 0, pivot / np.where(mag > 0, mag, 1.0), 1.0)
    return U * np.conj(phase), V * np.conj(phase)


def complex_svd(R) -> ComplexSVD:
    """Economy SVD of a complex (or real) matrix via the smaller Gram matrix."""
    R = np.ascontiguousarray(R, dtype=np.complex128)
    if R.ndim != 2:
        raise ParamError(f"expected a 2-D matrix, got ndim={R.ndim}")
    if not np.all(np.isfinite(R.view(np.float64))):
        raise NumericError("non-finite entries in SVD input")
    m, n = R.shape
    k = min(m, n)
    tall = n <= m
    gram = R.conj().T @ R if tall else R @ R.conj().T
    try:
        lam, W = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Gram eigendecomposition failed: {exc}") from exc
    lam = lam[::-1][:k]
    W = np.ascontiguousarray(W[:, ::-1][:, :k])
    sigma = np.sqrt(np.clip(lam, 0.0, None))
    smax = float(sigma[0]) if sigma.size else 0.0
    nonzero = sigma > ZERO_TOL * smax if smax > 0 else np.zeros(k, dtype=bool)
    sigma = np.where(nonzero, sigma, 0.0)
    other = np.zeros((m if tall else n, k), dtype=np.complex128)
    if tall:
        other[:, nonzero] = (R @ W[:, nonzero]) / sigma[nonzero]
        U = _complete_columns(other, nonzero.copy())
        V = W
    else:
        other[:, nonzero] = (R.conj().T @ W[:, nonzero]) / sigma[nonzero]
        V = _complete_columns(other, nonzero.copy())
        U = W
    U, V = _pin_phases(U, V)
    return ComplexSVD(U=U, S=sigma, Vh=V.conj().T)


def truncate_factors(svd: ComplexSVD, rank: int) -> LowRankFactors:
    """Best rank-r Frobenius approximation as a balanced factor pair."""
    k = svd.S.shape[0]
    if not 1 <= rank <= k:
        raise ParamError(f"rank must be in 1..{k}, got {rank}")
    root = np.sqrt(svd.S[:rank])
    return LowRankFactors(
        left=svd.U[:, :rank] * root,
        right=root[:, None] * svd.Vh[:rank],
        rank=rank,
        kept_singular_values=svd.S[:rank].copy(),
    )


def truncation_error(S, rank: int) -> float:
    """sqrt of the discarded tail energy, sqrt(sum_{k>rank} S_k^2)."""
    S = np.asarray(S, dtype=np.float64)
    if rank >= S.shape[0]:
        return 0.0
    return float(np.sqrt(np.sum(S[rank:] ** 2)))


def min_rank_for_error(S, target_rel: float) -> int:
    """Smallest r with truncation_error(S, r) <= target_rel * ||S||_2."""
    if not 0.0 < target_rel < 1.0:
        raise ParamError(f"target_rel must be in (0, 1), got {target_rel}")
    S = np.asarray(S, dtype=np.float64)
    total = float(np.sum(S**2))
    if total == 0.0:
        return 0
    sq = S**2
    # tail(r) = total - cumsum[:r]; scan ascending r
    tails = total - np.cumsum(sq)
    tails = np.maximum(tails, 0.0)
    budget = (target_rel**2) * total
    hits = np.nonzero(tails <= budget)[0]
    if hits.size == 0:
        return int(S.shape[0])
    return int(hits[0]) + 1
