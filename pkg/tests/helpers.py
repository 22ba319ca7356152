"""Random instances shared by the test modules."""

import numpy as np

from walkpovm.povm import Povm, Rank1Povm


def haar_unitary(n, rng):
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_ket(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_psd(d, rank, rng, scale=1.0):
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    A = G @ G.conj().T
    return scale * A / np.linalg.norm(A, 2)


def random_simple_rank1(d, n, rng):
    """Columns of ``d`` rows of an ``n x n`` Haar unitary give ``n`` rank-1 elements summing to 1."""
    V = haar_unitary(n, rng)[:d]
    norms = np.linalg.norm(V, axis=0)
    return Rank1Povm(norms**2, (V / norms).T)


def random_nonsimple_rank1(d, n_base, rng, max_copies=3):
    """A simple POVM whose items are split into proportional copies, then shuffled."""
    base = random_simple_rank1(d, n_base, rng)
    weights, kets = [], []
    for w, k in zip(base.weights, base.kets):
        copies = int(rng.integers(1, max_copies + 1))
        parts = rng.dirichlet(np.ones(copies)) * w
        weights.extend(parts)
        kets.extend([k] * copies)
    perm = rng.permutation(len(weights))
    return Rank1Povm(np.array(weights)[perm], np.array(kets)[perm])


def random_mixed_rank_povm(d, n, rng):
    """``n`` elements with random ranks in ``1..d``, built from one Haar isometry."""
    ranks = rng.integers(1, d + 1, size=n)
    while ranks.sum() < d:
        ranks[rng.integers(n)] += 1
        ranks = np.minimum(ranks, d)
    V = haar_unitary(int(ranks.sum()), rng)[:d]
    elements, start = [], 0
    for r in ranks:
        B = V[:, start:start + r]
        elements.append(B @ B.conj().T)
        start += r
    return Povm(elements)


def bisect_a_max(A, psi, iters=60):
    """Largest a keeping A - a|psi><psi| PSD, found by bisection on the support of A."""
    w, V = np.linalg.eigh(A)
    U = V[:, w > 1e-10 * w.max()]
    As, ps = U.conj().T @ A @ U, U.conj().T @ psi
    feasible = lambda a: np.linalg.eigvalsh(As - a * np.outer(ps, ps.conj()))[0] >= 0
    lo, hi = 0.0, 1.0
    while feasible(hi):
        hi *= 2
    for _ in range(iters):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if feasible(mid) else (lo, mid)
    return (lo + hi) / 2
