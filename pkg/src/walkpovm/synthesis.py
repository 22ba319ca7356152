"""Compile a rank-1 POVM into a walk program (two steps per element but the last).

Iteration ``i`` applies ``C1_i`` at ``x = 0`` and translates, then ``C2_i`` at
``x = 1`` and NOT at ``x = -1`` and translates. ``K_i`` tracks the coin-space map
onto the unnormalized coin state left at ``x = 0``; ``K_i^dag K_i`` is the part
of the identity not yet assigned to an outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, InvalidInputError
from .linalg import (
    DEFAULT_TOL,
    as_ket,
    as_matrix,
    complete_unitary,
    dagger,
    fix_phase,
    pseudo_inverse,
)
from .povm import Rank1Povm
from .program import CoinLayer, WalkProgram, not_coin, reflection_coin

# alpha'^2 within this window above 1 is roundoff; further above is an error.
ALPHA_CLAMP_ABOVE = 1e-9
# alpha'^2 this close below 1 also snaps to 1, so beta' = sqrt(1 - alpha'^2)
# cannot turn a 1e-16 roundoff into a 1e-8 spurious singular value of K.
ALPHA_SNAP_BELOW = 1e-12
# |psi> may leave supp(K) by at most this much before the element is rejected.
SUPPORT_TOL = 1e-7


@dataclass
class IterationRecord:
    K: np.ndarray  # K_i, after this iteration
    b: float
    alpha_prime: float
    beta_prime: float
    coin1: np.ndarray
    coin2: np.ndarray


@dataclass
class SynthesisTrace:
    records: list = field(default_factory=list)
    final_K: np.ndarray | None = None
    last_ket: np.ndarray | None = None

    @property
    def alpha_primes(self) -> list[float]:
        return [r.alpha_prime for r in self.records]

    def early_detection(self) -> dict[int, int]:
        """Item -> iteration after which its detector could already sit at ``x = 2``.

        Informational only; programs always measure at the end.
        """
        n_iter = len(self.records)
        return {j - 1: j for j in range(1, n_iter)}


def coin1(K_prev, psi, tol: float = DEFAULT_TOL,
          scan_order: Sequence[int] | None = None) -> tuple[np.ndarray, float]:
    """Coin whose first row is ``(K_prev^{dag+} psi / b)^dag`` with ``b = ||K_prev^{dag+} psi||``."""
    K = as_matrix(K_prev, "K_prev")
    v = as_ket(psi, "psi")
    d = K.shape[0]
    if K.shape != (d, d) or v.shape[0] != d:
        raise InvalidInputError("K_prev must be square and match psi")
    Kd = dagger(K)
    x = pseudo_inverse(Kd, tol) @ v
    b = float(np.linalg.norm(x))
    if b <= tol * d:
        raise InfeasibleError(f"element lies outside the remaining support (b = {b:.3e})")
    leak = float(np.linalg.norm(v - Kd @ x))
    if leak > SUPPORT_TOL:
        raise InfeasibleError(f"element leaves the remaining support by {leak:.3e}")
    C = complete_unitary([(x / b).conj()], d, scan_order)
    return C, b


def advance_K(K_prev, C1, beta_prime: float) -> np.ndarray:
    """``(|0><1| + beta'|1><0| + sum_{k>=2} |k><k|) C1 K_prev``."""
    K = as_matrix(K_prev, "K_prev")
    C = as_matrix(C1, "C1")
    if K.shape != C.shape or K.shape[0] != K.shape[1]:
        raise InvalidInputError(f"dimension mismatch: K {K.shape}, C1 {C.shape}")
    if not 0.0 <= beta_prime <= 1.0:
        raise InvalidInputError(f"beta' must lie in [0, 1], got {beta_prime}")
    M = np.eye(K.shape[0], dtype=complex)
    M[:2, :2] = [[0, 1], [beta_prime, 0]]
    return M @ C @ K


def coin2_params(a: float, b: float) -> tuple[float, float]:
    """``alpha' = sqrt(a) b`` and ``beta' = sqrt(1 - alpha'^2)``."""
    if not 0 < a <= 1 + ALPHA_CLAMP_ABOVE:
        raise InvalidInputError(f"weight must lie in (0, 1], got {a}")
    if not b > 0:
        raise InvalidInputError(f"b must be positive, got {b}")
    alpha_sq = a * b * b
    if alpha_sq > 1 + ALPHA_CLAMP_ABOVE:
        raise InfeasibleError(f"a * b^2 = {alpha_sq:.12g} exceeds 1; element does not fit")
    if alpha_sq >= 1 - ALPHA_SNAP_BELOW:
        return 1.0, 0.0
    return float(np.sqrt(alpha_sq)), float(np.sqrt(1 - alpha_sq))


def synthesize(r: Rank1Povm, tol: float = DEFAULT_TOL,
               scan_order: Sequence[int] | None = None) -> tuple[WalkProgram, SynthesisTrace]:
    """Walk program with ``n - 1`` iterations for an ``n``-item rank-1 POVM.

    Item ``j`` (0-based, ``j < n - 1``) is read at position ``2(n - 1 - j)`` and
    the last item at position 0. ``scan_order`` selects the basis-completion
    order inside each ``C1``; it changes the coins but not the induced POVM.
    """
    r.check(max(tol, DEFAULT_TOL))
    d, n = r.dim, len(r)
    NOT = not_coin(d)
    K = np.eye(d, dtype=complex)
    trace = SynthesisTrace()
    layers: list[CoinLayer] = []
    for i in range(n - 1):
        C1, b = coin1(K, r.kets[i], tol, scan_order)
        alpha, beta = coin2_params(float(r.weights[i]), b)
        C2 = np.eye(d, dtype=complex) if alpha == 1.0 else reflection_coin(d, alpha, beta)
        layers.append(CoinLayer({0: C1}))
        second = {-1: NOT} if alpha == 1.0 else {-1: NOT, 1: C2}
        layers.append(CoinLayer(second))
        K = advance_K(K, C1, beta)
        trace.records.append(IterationRecord(K, b, alpha, beta, C1, C2))
    trace.final_K = K
    trace.last_ket = np.array(r.kets[n - 1])
    outcome_positions = {2 * (n - 1 - j): j for j in range(n)}
    prog = WalkProgram(d, layers, outcome_positions, outcome_map=r.outcome_map)
    return prog, trace


def preparation_coin(zeta, scan_order: Sequence[int] | None = None) -> np.ndarray:
    """Unitary whose first column is ``zeta`` (it maps ``|0>`` to ``zeta``)."""
    z = as_ket(zeta, "target state")
    if abs(np.linalg.norm(z) - 1) > 1e-10:
        raise InvalidInputError("target states must be normalized")
    return dagger(complete_unitary([z.conj()], z.shape[0], scan_order))


def extend_post_measurement(prog: WalkProgram, trace: SynthesisTrace,
                            targets: Sequence, tol: float = DEFAULT_TOL) -> WalkProgram:
    """Append ``C1_n`` at ``x = 0`` and a final layer preparing ``targets[item]`` at each outcome position.

    Neither appended layer translates. Post-measurement states are delivered up
    to a global phase.
    """
    if trace.final_K is None or trace.last_ket is None:
        raise InvalidInputError("trace does not come from synthesize")
    if len(targets) != prog.n_items:
        raise InvalidInputError(f"need {prog.n_items} target states, got {len(targets)}")
    Cn, _ = coin1(trace.final_K, trace.last_ket, tol)
    Cn[0] = fix_phase(Cn[0])
    post = {x: preparation_coin(targets[item]) for x, item in prog.outcome_positions.items()}
    return WalkProgram(
        prog.dim,
        prog.layers + [CoinLayer({0: Cn}, translate=False)],
        prog.outcome_positions,
        post_layer=CoinLayer(post, translate=False),
        outcome_map=prog.outcome_map,
    )
