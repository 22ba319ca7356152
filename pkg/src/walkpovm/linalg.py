"""Dense complex-matrix primitives: pseudoinverse, numerical rank, unitary completion."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidInputError

DEFAULT_TOL = 1e-10

# Gram-Schmidt candidates whose residual falls below this are skipped.
_GS_SKIP = 1e-8


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return A


def as_ket(v, name: str = "ket") -> np.ndarray:
    x = np.asarray(v, dtype=complex)
    if x.ndim != 1 or x.size < 1:
        raise InvalidInputError(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return x


def dagger(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def pseudo_inverse(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse via SVD.

    Singular values at or below ``tol * sigma_max`` are treated as zero, so the
    cutoff is scale invariant. For invertible, well-conditioned input this is the
    ordinary inverse.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    A = as_matrix(M)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=complex)
    keep = s > tol * s[0]
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (dagger(Vh) * s_inv) @ dagger(U)


def numerical_rank(M, tol: float = DEFAULT_TOL, scale: float | None = None) -> int:
    """Number of singular values above ``tol * sigma_max`` (0 for the zero matrix).

    ``scale`` replaces ``sigma_max`` as the reference, for matrices that are
    differences of larger ones and may be pure roundoff.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    s = np.linalg.svd(as_matrix(M), compute_uv=False)
    ref = s[0] if scale is None else float(scale)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * ref))


def operator_norm(M) -> float:
    return float(np.linalg.svd(as_matrix(M), compute_uv=False)[0])


def psd_pinv_sqrt(A, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(A^+)^{1/2} for a Hermitian PSD matrix, using the same relative cutoff as pseudo_inverse."""
    A = as_matrix(A)
    w, V = np.linalg.eigh((A + dagger(A)) / 2)
    top = np.max(np.abs(w)) if w.size else 0.0
    if top == 0.0:
        return np.zeros_like(A)
    inv_sqrt = np.zeros_like(w)
    keep = w > tol * top
    inv_sqrt[keep] = 1.0 / np.sqrt(w[keep])
    return (V * inv_sqrt) @ dagger(V)


def support_projector(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the column space of ``M``."""
    A = as_matrix(M)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((A.shape[0], A.shape[0]), dtype=complex)
    Uk = U[:, s > tol * s[0]]
    return Uk @ dagger(Uk)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry (first on ties) is real positive."""
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        return v.copy()
    return v * (abs(v[k]) / v[k])


def complete_unitary(
    fixed_rows: Sequence, d: int, scan_order: Sequence[int] | None = None
) -> np.ndarray:
    """Extend orthonormal rows to a ``d x d`` unitary.

    The given rows are copied verbatim into the top of the result. The remaining
    rows come from Gram-Schmidt over the canonical basis vectors, visited in
    ``scan_order`` (default ``0, 1, ..., d-1``); candidates whose residual norm is
    below 1e-8 are skipped. Orthogonalisation is done twice per candidate.
    """
    if d < 1:
        raise InvalidInputError("d must be positive")
    rows = [as_ket(r, "fixed row") for r in fixed_rows]
    if len(rows) > d:
        raise InvalidInputError(f"{len(rows)} fixed rows do not fit in dimension {d}")
    if any(r.shape[0] != d for r in rows):
        raise InvalidInputError("fixed rows must have length d")
    if rows:
        R = np.vstack(rows)
        gram_err = np.max(np.abs(R.conj() @ R.T - np.eye(len(rows))))
        if gram_err > 1e-10:
            raise InvalidInputError(f"fixed rows are not orthonormal (residual {gram_err:.3e})")
    order = list(range(d)) if scan_order is None else [int(k) for k in scan_order]
    if sorted(order) != list(range(d)):
        raise InvalidInputError("scan_order must be a permutation of range(d)")

    basis = list(rows)
    for k in order:
        if len(basis) == d:
            break
        v = np.zeros(d, dtype=complex)
        v[k] = 1.0
        # rows are orthonormal under <r, v> = sum(conj(r) * v)
        for _ in range(2):
            for r in basis:
                v = v - np.vdot(r, v) * r
        nv = np.linalg.norm(v)
        if nv < _GS_SKIP:
            continue
        basis.append(v / nv)
    if len(basis) != d:
        raise InvalidInputError("could not complete the unitary")
    return np.vstack(basis)


def is_unitary(U, tol: float = 1e-10) -> bool:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.max(np.abs(U @ dagger(U) - np.eye(U.shape[0]))) <= tol)


def householder_complement(psi) -> np.ndarray:
    """Unitary ``H`` whose column 0 is ``psi`` up to phase; columns 1.. span its complement.

    Built from the reflection that sends ``psi`` to a multiple of ``|0>``.
    """
    psi = as_ket(psi)
    psi = psi / np.linalg.norm(psi)
    d = psi.shape[0]
    phase = psi[0] / abs(psi[0]) if psi[0] != 0 else 1.0
    w = psi.copy()
    w[0] += phase  # w = psi - alpha|0> with alpha = -phase, no cancellation
    H = np.eye(d, dtype=complex) - 2.0 * np.outer(w, w.conj()) / np.vdot(w, w).real
    return H
