"""Quality metrics: relative residual, recovery check, incoherence diagnostic."""

from __future__ import annotations

import numpy as np

from .kernel import ensure_matrix, svd_truncated

__all__ = [
    "RECOVERY_TOL",
    "factor_incoherence",
    "incoherence_of",
    "recovery_success",
    "relative_error",
]

# A trial counts as an exact recovery when the low-rank output is within this
# relative Frobenius distance of the ground truth.
RECOVERY_TOL = 1e-4


def _dense(a):
    return a.matrix() if hasattr(a, "matrix") else np.asarray(a, dtype=np.float64)


def relative_error(d, low_rank, sparse):
    """Relative residual ||D - L - S||_F / ||D||_F."""
    d = np.asarray(d, dtype=np.float64)
    d_norm = float(np.linalg.norm(d))
    if d_norm == 0.0:
        raise ValueError("relative error is undefined for an identically zero matrix")
    return float(np.linalg.norm(d - _dense(low_rank) - _dense(sparse)) / d_norm)


def recovery_success(l_true, l_estimate, tol=RECOVERY_TOL):
    """Whether ||L_est - L||_F / ||L||_F <= tol."""
    l_true = np.asarray(l_true, dtype=np.float64)
    true_norm = float(np.linalg.norm(l_true))
    if true_norm == 0.0:
        raise ValueError("recovery check is undefined for a zero ground truth")
    return bool(np.linalg.norm(_dense(l_estimate) - l_true) / true_norm <= tol)


def factor_incoherence(u, v):
    """Incoherence of a factorization from its orthonormal factors.

    max( (m/r) max_i ||e_i^T U||^2 , (n/r) max_j ||e_j^T V||^2 ); small values
    mean the singular vectors are spread out over the coordinates.
    """
    m, r = u.shape
    n = v.shape[0]
    mu_u = (m / r) * float(np.max(np.sum(u * u, axis=1)))
    mu_v = (n / r) * float(np.max(np.sum(v * v, axis=1)))
    return max(mu_u, mu_v)


def incoherence_of(l, rank):
    """Incoherence of ``l`` measured on its rank-``rank`` SVD factors."""
    l = ensure_matrix(l, "L")
    f = svd_truncated(l, rank)
    if f.sigma[0] == 0.0:
        raise ValueError("incoherence is undefined for a zero matrix")
    return factor_incoherence(f.U, f.V)
