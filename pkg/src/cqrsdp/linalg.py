"""Small deterministic linear-algebra layer used by the solver and extractor.

Thin wrappers over LAPACK (through numpy/scipy) that pin down the contracts
the rest of the package relies on:

* `sym_eigen`      -- ascending eigenvalues, deterministic eigenvector signs.
* `cholesky`       -- lower factor or the 1-based index of the failing pivot.
* `min_psd_eig`    -- smallest eigenvalue of a symmetric matrix.
* `nullspace`      -- orthonormal kernel basis at a relative tolerance.
* `min_norm_solve` -- least-squares/min-norm solve with a consistency check.

Determinism matters: reports are compared byte-for-byte across runs, so every
routine here is a pure function of its inputs for a fixed build.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack as _lapack

from .errors import InputError

__all__ = [
    "EigenResult",
    "CholeskyResult",
    "NullspaceResult",
    "sym_eigen",
    "cholesky",
    "min_psd_eig",
    "nullspace",
    "min_norm_solve",
]


def _require_sym(a, name="matrix") -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{name} must be square, got shape {m.shape}")
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # columns, vectors[:, k] pairs with values[k]


def sym_eigen(a) -> EigenResult:
    """Full symmetric eigendecomposition with a fixed sign convention.

    Eigenvalues ascend.  Each eigenvector is flipped, if needed, so that its
    largest-magnitude entry (smallest index on ties) is positive, which makes
    the output reproducible across runs for a fixed LAPACK build.
    """
    m = _require_sym(a)
    w, v = np.linalg.eigh(m)
    for k in range(v.shape[1]):
        col = v[:, k]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            v[:, k] = -col
    return EigenResult(values=w, vectors=v)


@dataclass(frozen=True)
class CholeskyResult:
    ok: bool
    factor: np.ndarray | None  # lower-triangular L with A = L L'
    failed_pivot: int | None   # 1-based index of the first non-PD pivot


def cholesky(a) -> CholeskyResult:
    """Lower Cholesky factor of a symmetric matrix, or where it failed.

    On failure `failed_pivot` is the 1-based order of the leading minor that
    is not positive definite (dpotrf's info), e.g. [[1, 2], [2, 1]] -> 2.
    """
    m = _require_sym(a)
    if m.shape[0] == 0:
        return CholeskyResult(ok=True, factor=np.zeros((0, 0)), failed_pivot=None)
    c, info = _lapack.dpotrf(m, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        return CholeskyResult(ok=False, factor=None, failed_pivot=int(info))
    if info < 0:
        raise InputError(f"illegal value in argument {-info} of dpotrf")
    return CholeskyResult(ok=True, factor=c, failed_pivot=None)


def min_psd_eig(a) -> float:
    """Smallest eigenvalue of a symmetric matrix (for PSD checks)."""
    m = _require_sym(a)
    if m.shape[0] == 0:
        return 0.0
    return float(np.linalg.eigvalsh(m)[0])


@dataclass(frozen=True)
class NullspaceResult:
    basis: np.ndarray  # orthonormal columns spanning ker(a)
    rank: int          # numerical rank of the input


def nullspace(a, tol: float = 1e-8) -> NullspaceResult:
    """Orthonormal basis (columns) of ker(a), plus the input's rank.

    Singular values below tol * s_max count as zero.  A matrix with zero rows
    has full-dimensional kernel: the identity basis is returned.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise InputError(f"nullspace expects a matrix, got shape {m.shape}")
    ncols = m.shape[1]
    if m.shape[0] == 0 or not m.any():
        return NullspaceResult(basis=np.eye(ncols), rank=0)
    u, s, vt = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol * s[0]))
    return NullspaceResult(basis=vt[rank:].T.copy(), rank=rank)


def min_norm_solve(a, b, tol: float = 1e-8) -> np.ndarray | None:
    """Minimum-norm x with a x = b, or None when the system is inconsistent.

    Consistency test: ||a x - b|| <= tol * (||a||_F ||x|| + ||b||).
    A matrix with zero rows is consistent with b of length 0 (x = 0).
    """
    m = np.asarray(a, dtype=float)
    rhs = np.asarray(b, dtype=float)
    if m.ndim != 2 or rhs.ndim != 1 or m.shape[0] != rhs.shape[0]:
        raise InputError(f"bad shapes for min_norm_solve: {m.shape} vs {rhs.shape}")
    if m.shape[0] == 0:
        return np.zeros(m.shape[1])
    x, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    resid = np.linalg.norm(m @ x - rhs)
    bound = tol * (np.linalg.norm(m) * np.linalg.norm(x) + np.linalg.norm(rhs))
    if resid > max(bound, tol * 1e-12):
        return None
    return x
