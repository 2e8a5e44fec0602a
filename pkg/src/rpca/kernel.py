"""Dense linear-algebra kernels: thin QR, small SVD, truncated SVD, spectral norm.

Every routine is a pure function of its inputs and deterministic on a given
platform; the randomized truncated-SVD path draws from a generator seeded by
the caller (default seed 0).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.sparse.linalg import svds

__all__ = [
    "DENSE_SVD_MAX",
    "SvdResult",
    "ThinQR",
    "ensure_matrix",
    "spectral_norm",
    "svd_small",
    "svd_truncated",
    "thin_qr",
]

# Full LAPACK SVD up to this min-dimension; randomized subspace iteration beyond.
DENSE_SVD_MAX = 1024

_RSVD_OVERSAMPLE = 10
_RSVD_POWER_ITERS = 4


class ThinQR(NamedTuple):
    Q: np.ndarray  # (n, r), orthonormal columns
    R: np.ndarray  # (r, r), upper triangular


class SvdResult(NamedTuple):
    U: np.ndarray      # orthonormal columns
    sigma: np.ndarray  # non-negative, descending
    V: np.ndarray      # orthonormal columns


def ensure_matrix(a, name="matrix"):
    """Validate ``a`` as a non-empty finite real matrix; return float64, row-major."""
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {out.shape}")
    if out.size == 0:
        raise ValueError(f"{name} must be non-empty, got shape {out.shape}")
    if not np.isfinite(out).all():
        raise ValueError(f"{name} contains non-finite entries")
    return out


def thin_qr(a):
    """Thin QR factorization A = QR with non-negative diagonal of R.

    Householder-based (LAPACK); column signs are then normalized so that
    diag(R) >= 0, which pins the factorization down for full-rank input.
    Rank-deficient input is allowed and simply yields a singular R.
    """
    a = ensure_matrix(a, "A")
    n, r = a.shape
    if n < r:
        raise ValueError(f"thin QR needs rows >= cols, got shape {a.shape}")
    q, rr = np.linalg.qr(a, mode="reduced")
    flip = np.diagonal(rr) < 0.0
    if flip.any():
        q[:, flip] *= -1.0
        rr[flip, :] *= -1.0
    return ThinQR(q, rr)


def _fix_svd_signs(u, v):
    # Deterministic sign choice: the largest-magnitude entry of each column of
    # U is made positive (first such entry on ties); V columns flip along.
    lead = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0.0] = 1.0
    return u * signs, v * signs


def svd_small(a):
    """Full SVD of a small dense matrix, U diag(sigma) V^T = A.

    Returns all min(p, q) triplets with descending singular values and a
    deterministic sign convention (largest-magnitude entry of each column of
    U positive).
    """
    a = ensure_matrix(a, "A")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    u, v = _fix_svd_signs(u, vh.T)
    return SvdResult(u, s, v)


def svd_truncated(a, r, seed=0):
    """Top-r singular triplets of ``a``.

    Uses the full LAPACK SVD when min(a.shape) <= DENSE_SVD_MAX, and seeded
    randomized subspace iteration (oversampling 10, 4 power iterations)
    beyond that, so large decompositions stay reproducible without an
    external Lanczos dependency.
    """
    a = ensure_matrix(a, "A")
    m, n = a.shape
    if not 1 <= r <= min(m, n):
        raise ValueError(f"rank {r} out of range for a {m} x {n} matrix")
    if min(m, n) <= DENSE_SVD_MAX:
        u, s, v = svd_small(a)
        return SvdResult(u[:, :r].copy(), s[:r].copy(), v[:, :r].copy())
    return _randomized_svd(a, r, seed)


def _randomized_svd(a, r, seed):
    m, n = a.shape
    k = min(r + _RSVD_OVERSAMPLE, min(m, n))
    rng = np.random.default_rng(seed)
    q = np.linalg.qr(a @ rng.standard_normal((n, k)), mode="reduced")[0]
    for _ in range(_RSVD_POWER_ITERS):
        q = np.linalg.qr(a.T @ q, mode="reduced")[0]
        q = np.linalg.qr(a @ q, mode="reduced")[0]
    ub, s, vb = svd_small(q.T @ a)
    u, v = _fix_svd_signs(q @ ub[:, :r], vb[:, :r])
    return SvdResult(u, s[:r].copy(), v)


def spectral_norm(a):
    """Largest singular value of ``a``."""
    a = ensure_matrix(a, "A")
    if min(a.shape) <= DENSE_SVD_MAX:
        return float(np.linalg.svd(a, compute_uv=False)[0])
    # Lanczos with a fixed start vector: accurate and deterministic at sizes
    # where the full SVD is too expensive.
    v0 = np.ones(min(a.shape))
    return float(svds(a, k=1, v0=v0, return_singular_vectors=False)[0])
