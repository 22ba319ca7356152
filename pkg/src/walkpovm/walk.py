"""State-vector simulation of coined walks on the line.

The shift moves coin ``|0>`` up by one site, coin ``|1>`` down by one site and
leaves coins ``|2>..|d-1>`` in place. The lattice is a dense window that grows by
one site on each side per translation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidInputError, NoAmplitudeError
from .linalg import as_ket, dagger
from .program import CoinLayer, WalkProgram


@dataclass
class WalkState:
    """Amplitudes ``amplitudes[x - min_pos, c]``.

    A trailing axis of size ``m`` holds ``m`` independent coin-space columns,
    which is how Kraus operators are evolved in one pass.
    """

    dim: int
    min_pos: int
    amplitudes: np.ndarray  # (n_pos, d) or (n_pos, d, m)

    @classmethod
    def initial(cls, coin_state) -> "WalkState":
        psi = np.asarray(coin_state, dtype=complex)
        return cls(psi.shape[0], 0, psi[None, ...].copy())

    @property
    def max_pos(self) -> int:
        return self.min_pos + self.amplitudes.shape[0] - 1

    @property
    def positions(self) -> range:
        return range(self.min_pos, self.max_pos + 1)

    def at(self, x: int) -> np.ndarray:
        if x < self.min_pos or x > self.max_pos:
            return np.zeros(self.amplitudes.shape[1:], dtype=complex)
        return self.amplitudes[x - self.min_pos]

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def position_probabilities(self) -> dict[int, float]:
        p = np.sum(np.abs(self.amplitudes) ** 2, axis=tuple(range(1, self.amplitudes.ndim)))
        return {x: float(v) for x, v in zip(self.positions, p)}

    def mass_below(self, x: int) -> float:
        """Total squared amplitude strictly below position ``x``."""
        k = max(0, min(x - self.min_pos, self.amplitudes.shape[0]))
        return float(np.sum(np.abs(self.amplitudes[:k]) ** 2))


def step(state: WalkState, layer: CoinLayer, translate: bool | None = None) -> WalkState:
    """Apply the layer's coins, then the shift if ``translate`` (default: ``layer.translate``)."""
    d = state.dim
    layer.check(d)
    if translate is None:
        translate = layer.translate
    amps = state.amplitudes.copy()
    for x, C in layer.coins.items():
        k = x - state.min_pos
        if 0 <= k < amps.shape[0]:
            amps[k] = C @ amps[k]
    if not translate:
        return WalkState(d, state.min_pos, amps)
    shifted = np.zeros((amps.shape[0] + 2,) + amps.shape[1:], dtype=complex)
    shifted[2:, 0] = amps[:, 0]
    shifted[:-2, 1] = amps[:, 1]
    shifted[1:-1, 2:] = amps[:, 2:]
    return WalkState(d, state.min_pos - 1, shifted)


def evolve(prog: WalkProgram, state: WalkState) -> Iterator[WalkState]:
    """Yield the state after every layer, the post layer included."""
    if state.dim != prog.dim:
        raise InvalidInputError(f"state dimension {state.dim} does not match program dimension {prog.dim}")
    for layer in prog.layers:
        state = step(state, layer)
        yield state
    if prog.post_layer is not None:
        yield step(state, prog.post_layer, translate=False)


def final_state(prog: WalkProgram, state: WalkState) -> WalkState:
    for state in evolve(prog, state):
        pass
    return state


def _normalized_input(prog: WalkProgram, coin_state, tol: float = 1e-10) -> np.ndarray:
    psi = as_ket(coin_state, "coin state")
    if psi.shape[0] != prog.dim:
        raise InvalidInputError(f"coin state has dimension {psi.shape[0]}, program has {prog.dim}")
    if abs(np.linalg.norm(psi) - 1) > tol:
        raise InvalidInputError("coin state is not normalized")
    return psi


def run(prog: WalkProgram, coin_state) -> tuple[WalkState, dict[int, float]]:
    """Evolve ``|x=0> (x) coin_state``; return the final state and the position distribution."""
    psi = _normalized_input(prog, coin_state)
    final = final_state(prog, WalkState.initial(psi))
    return final, final.position_probabilities()


@dataclass
class InducedPovm:
    """Per-position Kraus operators ``M_x`` and effects ``Omega_x = M_x^dag M_x``."""

    kraus: dict
    elements: dict

    def total(self) -> np.ndarray:
        return sum(self.elements.values())

    def probabilities(self, coin_state) -> dict[int, float]:
        psi = np.asarray(coin_state, dtype=complex)
        return {x: float(np.vdot(psi, E @ psi).real) for x, E in self.elements.items()}


def kraus_operators(prog: WalkProgram) -> dict[int, np.ndarray]:
    """Column ``c`` of ``M_x`` is the coin amplitude at ``x`` when starting from ``|0, c>``."""
    start = WalkState.initial(np.eye(prog.dim, dtype=complex))
    final = final_state(prog, start)
    return {x: final.at(x).copy() for x in final.positions}


def induced_povm(prog: WalkProgram) -> InducedPovm:
    kraus = kraus_operators(prog)
    elements = {x: dagger(M) @ M for x, M in kraus.items()}
    return InducedPovm(kraus, elements)


def item_elements(prog: WalkProgram, induced: InducedPovm | None = None) -> list[np.ndarray]:
    """Induced effect of every rank-1 item, in item order."""
    induced = induced_povm(prog) if induced is None else induced
    zero = np.zeros((prog.dim, prog.dim), dtype=complex)
    out = [zero] * prog.n_items
    for x, item in prog.outcome_positions.items():
        out[item] = induced.elements.get(x, zero)
    return out


def outcome_elements(prog: WalkProgram, n_outcomes: int | None = None,
                     induced: InducedPovm | None = None) -> list[np.ndarray]:
    """Induced effects summed over all positions that share an original outcome."""
    per_item = item_elements(prog, induced)
    n_out = n_outcomes
    if n_out is None:
        n_out = 1 + max((prog.item_outcome(i) for i in range(len(per_item))), default=-1)
    out = [np.zeros((prog.dim, prog.dim), dtype=complex) for _ in range(n_out)]
    for i, E in enumerate(per_item):
        o = prog.item_outcome(i)
        if o >= n_out:
            raise InvalidInputError(f"item {i} maps to outcome {o}, only {n_out} outcomes expected")
        out[o] = out[o] + E
    return out


def unassigned_weight(prog: WalkProgram, induced: InducedPovm | None = None) -> float:
    """Spectral norm of the summed effects at positions that carry no outcome."""
    induced = induced_povm(prog) if induced is None else induced
    rest = [E for x, E in induced.elements.items() if x not in prog.outcome_positions]
    if not rest:
        return 0.0
    return float(np.linalg.norm(sum(rest), 2))


def conditional_state(prog: WalkProgram, coin_state, position: int,
                      min_probability: float = 1e-12) -> tuple[float, np.ndarray]:
    """Probability of finding the walker at ``position`` and the normalized coin state there."""
    final, probs = run(prog, coin_state)
    p = probs.get(position, 0.0)
    if p <= min_probability:
        raise NoAmplitudeError(f"position {position} has probability {p:.3e}")
    out = final.at(position)
    return p, out / np.linalg.norm(out)


def sample(prog: WalkProgram, coin_state, shots: int, seed: int) -> dict[int, int]:
    """Histogram of ``shots`` i.i.d. position draws (inverse CDF, numpy PCG64 generator).

    Only positions that were drawn appear in the result.
    """
    if shots < 1:
        raise InvalidInputError("shots must be at least 1")
    _, probs = run(prog, coin_state)
    positions = np.array(list(probs.keys()))
    p = np.array(list(probs.values()))
    cdf = np.cumsum(p / p.sum())
    cdf[-1] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    counts = np.bincount(idx, minlength=positions.size)
    return {int(x): int(c) for x, c in zip(positions, counts) if c > 0}
