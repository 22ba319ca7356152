"""Peeling variant of the compiler.

Each iteration extracts the largest multiple of ``|psi_i><psi_i|`` that still
fits into the residual operator, then a rotation at ``x = 1`` trims it to the
target weight. A counter ``j`` records how many coin states have been retired
from position 0; retired states live in the top ``j`` basis kets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, InfeasibleError, InvalidInputError
from .linalg import (
    DEFAULT_TOL,
    as_ket,
    as_matrix,
    complete_unitary,
    dagger,
    fix_phase,
    householder_complement,
    numerical_rank,
    psd_pinv_sqrt,
)
from .povm import Rank1Povm
from .program import CoinLayer, WalkProgram, not_coin, reflection_coin

log = logging.getLogger(__name__)

# Singular values of the eta constraint matrix below this count as zero.
NULL_TOL = 1e-9
# If no singular value is below NULL_TOL, the smallest one may still be used up to here.
NULL_FALLBACK = 1e-6
# Relative disagreement allowed between the closed-form a_max and the realized weight.
AMAX_AGREEMENT = 1e-6


def a_max(A, psi, tol: float = DEFAULT_TOL) -> float:
    """Largest ``a`` with ``A - a |psi><psi|`` positive semidefinite, ``1 / ||(A^+)^{1/2} psi||^2``."""
    A = as_matrix(A, "A")
    v = as_ket(psi, "psi")
    if A.shape != (v.shape[0], v.shape[0]):
        raise InvalidInputError("A and psi dimensions differ")
    if np.max(np.abs(A - dagger(A))) > max(tol, 1e-12) * max(1.0, np.max(np.abs(A))):
        raise InvalidInputError("A is not Hermitian")
    w, V = np.linalg.eigh((A + dagger(A)) / 2)
    top = max(abs(w[0]), abs(w[-1]))
    if w[0] < -max(tol, 1e-12) * max(top, 1.0):
        raise InvalidInputError(f"A is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    if top == 0.0:
        raise InfeasibleError("A is zero")
    outside = V[:, w <= tol * top]
    leak = float(np.linalg.norm(dagger(outside) @ v)) / float(np.linalg.norm(v))
    if leak > 1e-7:
        raise InfeasibleError(f"psi is outside supp(A) (leak {leak:.3e})")
    y = psd_pinv_sqrt(A, tol) @ v
    return 1.0 / float(np.vdot(y, y).real)


def choose_eta(phi_list: Sequence, j: int, d: int) -> np.ndarray:
    """Unit ket orthogonal to every ``phi`` and to ``|d-1>, ..., |d-j>``.

    Among several candidates, the normalized projection of the canonical basis
    vector with the largest overlap onto the allowed subspace is taken (smallest
    index on ties), then phase-fixed.
    """
    if not 0 <= j <= d - 1:
        raise InvalidInputError(f"counter j = {j} out of range for d = {d}")
    k = d - j
    phis = [as_ket(p, "phi") for p in phi_list]
    if any(p.shape[0] != d for p in phis):
        raise InvalidInputError("phi kets must have dimension d")
    rows = np.array([p[:k].conj() for p in phis]).reshape(len(phis), k)
    if rows.size == 0 or not np.any(rows):
        N = np.eye(k, dtype=complex)
    else:
        _, s, Vh = np.linalg.svd(rows, full_matrices=True)
        s_full = np.zeros(k)
        s_full[: s.size] = s
        null = s_full <= NULL_TOL
        if not null.any():
            if s_full[-1] > NULL_FALLBACK:
                raise InfeasibleError(
                    f"span of the phi kets is too large (smallest singular value {s_full[-1]:.3e})"
                )
            null[-1] = True
        N = dagger(Vh[null])
    P = N @ dagger(N)
    diag = P.diagonal().real
    c = int(np.flatnonzero(diag >= diag.max() - 1e-12)[0])
    eta = np.zeros(d, dtype=complex)
    eta[:k] = fix_phase(P[:, c] / np.linalg.norm(P[:, c]))
    return eta


def build_coin1_alt(phi_list: Sequence, j: int, d: int,
                    eta: np.ndarray | None = None) -> np.ndarray:
    """``|0><eta| + sum_m |m><eta_perp_m|`` with ``eta_perp_m = |m>`` for the top ``j`` kets."""
    if eta is None:
        eta = choose_eta(phi_list, j, d)
    k = d - j
    C = np.eye(d, dtype=complex)
    C[:k, :k] = complete_unitary([eta[:k].conj()], k)
    return C


def swap_coin(d: int, j: int) -> np.ndarray:
    """Exchange ``|1>`` and ``|d-j>``."""
    C = np.eye(d, dtype=complex)
    m = d - j
    C[[1, m]] = C[[m, 1]]
    return C


@dataclass
class AltIterationRecord:
    gamma_prev: np.ndarray
    L: np.ndarray  # initial coin state -> coin state at x = 0, start of iteration
    a_tilde: float
    realized_weight: float
    theta: float
    j_start: int
    j_end: int
    coin1: np.ndarray
    coin2: np.ndarray
    coin3: np.ndarray | None
    not_applied: bool
    gamma: np.ndarray
    rank_gamma: int


@dataclass
class AltTrace:
    records: list = field(default_factory=list)
    final_L: np.ndarray | None = None


def synthesize_alt(r: Rank1Povm, tol: float = DEFAULT_TOL,
                   equal_tol: float = 1e-9) -> tuple[WalkProgram, AltTrace]:
    """Compile ``r`` with the peeling variant.

    ``equal_tol`` decides when the extracted weight equals the target weight
    (``a_tilde - a <= equal_tol * max(1, a)``), which retires one coin state.
    The NOT at ``x = 0`` for a full counter and the swap coin after a retirement
    are stored as extra layers that do not translate.
    """
    r.check(max(tol, DEFAULT_TOL))
    d, n = r.dim, len(r)
    NOT = not_coin(d)
    L = np.eye(d, dtype=complex)
    gamma = np.eye(d, dtype=complex)
    j = 0
    trace = AltTrace()
    layers: list[CoinLayer] = []
    for i in range(n - 1):
        psi = r.kets[i]
        a = float(r.weights[i])
        perp = householder_complement(psi)[:, 1:]
        phis = list((L @ perp).T)
        eta = choose_eta(phis, j, d)
        C1 = build_coin1_alt(phis, j, d, eta)
        a_tilde = a_max(gamma, psi, tol)
        realized = float(np.linalg.norm(dagger(L) @ eta) ** 2)
        if abs(realized - a_tilde) > AMAX_AGREEMENT * max(1.0, a_tilde):
            raise ConsistencyError(
                f"iteration {i + 1}: extracted weight {realized:.12g} differs from a_max {a_tilde:.12g}"
            )
        if a > realized + equal_tol * max(1.0, a):
            raise InfeasibleError(f"iteration {i + 1}: weight {a:.12g} exceeds available {realized:.12g}")
        equal = realized - a <= equal_tol * max(1.0, a)
        if equal:
            cos_t, sin_t = 1.0, 0.0
            log.debug("iteration %d: weights coincide (%.3e), retiring a coin state", i + 1, realized - a)
        else:
            cos_t = float(np.sqrt(a / realized))
            sin_t = float(np.sqrt(1.0 - cos_t * cos_t))
        C2 = reflection_coin(d, cos_t, sin_t)
        layers.append(CoinLayer({0: C1}))
        layers.append(CoinLayer({-1: NOT, 1: C2}))
        M = np.eye(d, dtype=complex)
        M[:2, :2] = [[0, 1], [sin_t, 0]]
        L_next = M @ C1 @ L

        j_start = j
        fix = np.eye(d, dtype=complex)
        not_applied = j == d - 1
        if not_applied:
            fix = NOT
        C3 = None
        if equal:
            j += 1
            if j > d - 1:
                raise ConsistencyError(f"iteration {i + 1}: counter exceeded d - 1")
            C3 = swap_coin(d, j)
            fix = C3 @ fix
        if not_applied or equal:
            layers.append(CoinLayer({0: fix}, translate=False))
            L_next = fix @ L_next

        gamma_prev = gamma
        gamma = gamma - a * np.outer(psi, psi.conj())
        if np.linalg.eigvalsh((gamma + dagger(gamma)) / 2)[0] < -1e-8:
            raise ConsistencyError(f"iteration {i + 1}: residual operator lost positivity")
        trace.records.append(
            AltIterationRecord(
                gamma_prev=gamma_prev,
                L=L,
                a_tilde=a_tilde,
                realized_weight=realized,
                theta=float(np.arccos(min(cos_t, 1.0))),
                j_start=j_start,
                j_end=j,
                coin1=C1,
                coin2=C2,
                coin3=C3,
                not_applied=not_applied,
                gamma=gamma,
                rank_gamma=numerical_rank(gamma, tol, scale=1.0),
            )
        )
        L = L_next
    trace.final_L = L
    outcome_positions = {2 * (n - 1 - i): i for i in range(n)}
    prog = WalkProgram(d, layers, outcome_positions, outcome_map=r.outcome_map)
    return prog, trace
