"""POVM data model, validation, Born rule and rank-1 decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .linalg import DEFAULT_TOL, as_ket, as_matrix, dagger, fix_phase


@dataclass(frozen=True)
class Povm:
    """Ordered list of ``d x d`` POVM elements. Validity is checked by :func:`validate`."""

    elements: tuple

    def __init__(self, elements: Sequence):
        mats = tuple(as_matrix(E, "POVM element") for E in elements)
        if not mats:
            raise InvalidInputError("a POVM needs at least one element")
        d = mats[0].shape[0]
        for E in mats:
            if E.shape != (d, d):
                raise InvalidInputError(f"POVM elements must all be {d}x{d}, got {E.shape}")
        object.__setattr__(self, "elements", mats)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Rank1Povm:
    """Items ``a_i |psi_i><psi_i|`` plus the index of the source element each came from."""

    weights: np.ndarray
    kets: np.ndarray  # shape (n, d), row i is psi_i
    outcome_map: tuple

    def __init__(self, weights, kets, outcome_map: Sequence[int] | None = None):
        w = np.asarray(weights, dtype=float).reshape(-1)
        K = np.asarray(kets, dtype=complex)
        if K.ndim != 2 or K.shape[0] != w.shape[0] or w.size == 0:
            raise InvalidInputError("weights and kets must describe the same non-empty list")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(K))):
            raise InvalidInputError("non-finite weights or kets")
        omap = tuple(range(w.size)) if outcome_map is None else tuple(int(o) for o in outcome_map)
        if len(omap) != w.size:
            raise InvalidInputError("outcome_map length must match the number of items")
        w.setflags(write=False)
        K.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kets", K)
        object.__setattr__(self, "outcome_map", omap)

    @classmethod
    def from_povm(cls, p: Povm, tol: float = DEFAULT_TOL) -> "Rank1Povm":
        return decompose_rank1(p, tol)

    @property
    def dim(self) -> int:
        return self.kets.shape[1]

    def __len__(self) -> int:
        return self.weights.size

    def element(self, i: int) -> np.ndarray:
        return self.weights[i] * np.outer(self.kets[i], self.kets[i].conj())

    def elements(self) -> list[np.ndarray]:
        return [self.element(i) for i in range(len(self))]

    def to_povm(self) -> Povm:
        return Povm(self.elements())

    def regroup(self, per_item: Sequence[np.ndarray] | None = None) -> list[np.ndarray]:
        """Sum per-item operators (default: the items themselves) by ``outcome_map``."""
        mats = self.elements() if per_item is None else list(per_item)
        n_out = max(self.outcome_map) + 1
        out = [np.zeros((self.dim, self.dim), dtype=complex) for _ in range(n_out)]
        for m, o in zip(mats, self.outcome_map):
            out[o] = out[o] + m
        return out

    def check(self, tol: float = DEFAULT_TOL) -> None:
        """Raise :class:`InvalidInputError` unless every Rank1Povm invariant holds."""
        if np.any(self.weights <= 0) or np.any(self.weights > 1 + tol):
            raise InvalidInputError("weights must lie in (0, 1]")
        norms = np.linalg.norm(self.kets, axis=1)
        if np.max(np.abs(norms - 1)) > tol:
            raise InvalidInputError("kets must be normalized")
        total = sum(self.elements())
        resid = np.max(np.abs(total - np.eye(self.dim)))
        if resid > tol:
            raise InvalidInputError(f"items do not sum to the identity (residual {resid:.3e})")


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_residual: float
    psd_violation: float
    completeness_residual: float
    passed: bool

    def __bool__(self) -> bool:
        return self.passed


def validate(p: Povm, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Residuals are max-entry (hermiticity), -min eigenvalue (PSD) and spectral norm (completeness)."""
    d = p.dim
    herm = 0.0
    psd = 0.0
    total = np.zeros((d, d), dtype=complex)
    for E in p.elements:
        herm = max(herm, float(np.max(np.abs(E - dagger(E)))))
        w = np.linalg.eigvalsh((E + dagger(E)) / 2)
        psd = max(psd, float(-w[0]))
        total = total + E
    comp = float(np.linalg.norm(total - np.eye(d), 2))
    return ValidationReport(herm, psd, comp, herm <= tol and psd <= tol and comp <= tol)


def _as_density(state, d: int, tol: float) -> np.ndarray:
    x = np.asarray(state, dtype=complex)
    if x.ndim == 1:
        psi = as_ket(x, "state")
        if psi.shape[0] != d:
            raise InvalidInputError(f"state has dimension {psi.shape[0]}, POVM has {d}")
        if abs(np.vdot(psi, psi).real - 1) > tol:
            raise InvalidInputError("state is not normalized")
        return np.outer(psi, psi.conj())
    rho = as_matrix(x, "density matrix")
    if rho.shape != (d, d):
        raise InvalidInputError(f"density matrix has shape {rho.shape}, POVM has dimension {d}")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidInputError("density matrix does not have unit trace")
    return rho


def born_probabilities(p: Povm, state, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Outcome probabilities ``Tr(rho E_i)`` for a ket or a density matrix."""
    report = validate(p, tol)
    if not report:
        raise InvalidInputError(f"invalid POVM: {report}")
    rho = _as_density(state, p.dim, tol)
    probs = np.array([np.trace(rho @ E).real for E in p.elements])
    if probs.min() < -tol:
        raise InvalidInputError(f"negative probability {probs.min():.3e}")
    return np.clip(probs, 0.0, None)


def _lex_key(v: np.ndarray) -> tuple:
    return tuple(x for z in v for x in (round(z.real, 12), round(z.imag, 12)))


def _canonical_eigenbasis(V: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(columns of V), independent of LAPACK's choice."""
    d, k = V.shape
    if k == 1:
        return fix_phase(V[:, 0])[:, None]
    P = V @ dagger(V)
    basis: list[np.ndarray] = []
    for c in range(d):
        v = P[:, c].copy()
        for _ in range(2):
            for b in basis:
                v = v - np.vdot(b, v) * b
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        basis.append(fix_phase(v / nv))
        if len(basis) == k:
            break
    return np.column_stack(basis)


def decompose_rank1(p: Povm, tol: float = DEFAULT_TOL) -> Rank1Povm:
    """Split every element into weighted pure-state items via its eigendecomposition.

    Eigenvalues ``<= tol`` are dropped, so zero elements produce no items. Inside
    an element items are ordered by descending eigenvalue, ties broken by
    lexicographic order of the (phase-fixed) eigenvector amplitudes. Degenerate
    eigenspaces get a canonical basis from projecting the standard basis.
    """
    report = validate(p, tol)
    if not report:
        raise InvalidInputError(f"invalid POVM: {report}")
    weights: list[float] = []
    kets: list[np.ndarray] = []
    omap: list[int] = []
    for idx, E in enumerate(p.elements):
        w, V = np.linalg.eigh((E + dagger(E)) / 2)
        if w[-1] > 1 + tol:
            raise InvalidInputError(f"element {idx} exceeds the identity (eigenvalue {w[-1]:.6g})")
        keep = w > tol
        w, V = w[keep][::-1], V[:, keep][:, ::-1]
        items: list[tuple[float, np.ndarray]] = []
        start = 0
        while start < w.size:
            stop = start + 1
            while stop < w.size and w[stop - 1] - w[stop] <= tol:
                stop += 1
            cluster = w[start:stop]
            B = _canonical_eigenbasis(V[:, start:stop])
            if stop - start == 1:
                items.append((float(cluster[0]), B[:, 0]))
            else:
                lam = float(np.mean(cluster))
                cols = sorted((B[:, c] for c in range(B.shape[1])), key=_lex_key)
                items.extend((lam, v) for v in cols)
            start = stop
        for lam, v in items:
            weights.append(min(lam, 1.0))
            kets.append(v)
            omap.append(idx)
    if not weights:
        raise InvalidInputError("POVM has no nonzero elements")
    return Rank1Povm(weights, np.vstack(kets), omap)
