"""Qutrit SIC-POVMs from the Heisenberg-Weyl orbit of ``(|1> - e^{it}|2>)/sqrt(2)``.

Also carries the hand-derived 16-step schedule for the whole family, used as
a regression fixture for the general compiler.
"""

from __future__ import annotations

import numpy as np

from .povm import Povm
from .program import CoinLayer, WalkProgram, not_coin, reflection_coin

OMEGA = np.exp(2j * np.pi / 3)
Q = np.exp(1j * np.pi / 6)

SHIFT = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)
PHASE = np.diag([1, OMEGA, OMEGA**2])

# (alpha'_i)^2 for the eight iterations; identical for every t.
ALPHA_PRIME_SQUARED = (1 / 3, 3 / 8, 2 / 5, 1 / 2, 2 / 3, 1.0, 2 / 3, 1.0)
ALPHA_PRIMES = tuple(float(np.sqrt(v)) for v in ALPHA_PRIME_SQUARED)


def _reduce(t: float) -> float:
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    return t % (2 * np.pi)


def fiducial(t: float) -> np.ndarray:
    t = _reduce(t)
    return np.array([0, 1, -np.exp(1j * t)], dtype=complex) / np.sqrt(2)


def sic_states(t: float) -> list[np.ndarray]:
    """The nine kets ``X^j Z^k |psi_t>``, item ``3j + k``."""
    psi = fiducial(t)
    mp = np.linalg.matrix_power
    return [mp(SHIFT, j) @ mp(PHASE, k) @ psi for j in range(3) for k in range(3)]


def sic_povm(t: float) -> Povm:
    return Povm([np.outer(v, v.conj()) / 3 for v in sic_states(t)])


def paper_coins(t: float) -> list[np.ndarray]:
    """The eight position-0 coins of the hand-derived schedule, as displayed (rows are bras)."""
    t = _reduce(t)
    e = np.exp(1j * t)
    ec = e.conjugate()
    q = Q
    r2, r3, r6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)
    coins = [
        [[0, 1 / r2, -ec / r2], [1, 0, 0], [0, 1 / r2, ec / r2]],
        [[0, -1 / r3, -1j * np.sqrt(2 / 3)], [1, 0, 0], [0, np.sqrt(2 / 3), -1j / r3]],
        [[0, -1 / r6, -np.sqrt(5 / 6)], [1, 0, 0], [0, np.sqrt(5 / 6), -1 / r6]],
        [
            [-ec / r3, e / (q**2 * r3), q * e / r3],
            [0, 1 / r2, -1j / r2],
            [2 * q**2 * ec**2 / r6, 1 / r6, 1j / r6],
        ],
        [[0, 1 / (q**5 * r2), -q * e / r2], [1, 0, 0], [0, 1 / r2, -e / r2]],
        [[0, -(q**2) / r2, -1 / r2], [1, 0, 0], [0, 1 / r2, -1 / (q**2 * r2)]],
        [[q**2 * ec / r2, 0, q * e / r2], [0, 1, 0], [1 / r2, 0, q**5 * e**2 / r2]],
        [[0, -1 / r2, q**5 * ec / r2], [1, 0, 0], [0, 1 / r2, q**5 * ec / r2]],
    ]
    return [np.array(c, dtype=complex) for c in coins]


def paper_schedule(t: float) -> WalkProgram:
    """Sixteen layers; positions 16, 14, ..., 0 carry SIC items 0..8."""
    NOT = not_coin(3)
    layers = []
    for C1, alpha_sq in zip(paper_coins(t), ALPHA_PRIME_SQUARED):
        layers.append(CoinLayer({0: C1}))
        if alpha_sq == 1.0:
            layers.append(CoinLayer({-1: NOT}))
        else:
            alpha, beta = np.sqrt(alpha_sq), np.sqrt(1 - alpha_sq)
            layers.append(CoinLayer({-1: NOT, 1: reflection_coin(3, alpha, beta)}))
    return WalkProgram(3, layers, {16 - 2 * i: i for i in range(9)})


def closed_form_amplitudes(t: float, state) -> dict[int, tuple[int, complex]]:
    """Joint state after the eight iterations: position -> (coin index, amplitude)."""
    t = _reduce(t)
    a, b, c = np.asarray(state, dtype=complex)
    ec = np.exp(-1j * t)
    q4, qm4 = Q**4, Q**-4
    s6 = np.sqrt(6)
    return {
        16: (0, (b - c * ec) / s6),
        14: (0, q4 / s6 * (b * q4 - c * ec)),
        12: (0, qm4 / s6 * (b * qm4 - c * ec)),
        10: (0, (c - a * ec) / s6),
        8: (0, q4 / s6 * (c * q4 - a * ec)),
        6: (0, qm4 / s6 * (c * qm4 - a * ec)),
        4: (0, (a - b * ec) / s6),
        2: (0, q4 / s6 * (a * q4 - b * ec)),
        0: (2, -qm4 / s6 * (a * qm4 - b * ec)),
    }


def closed_form_probabilities(t: float, state) -> dict[int, float]:
    return {x: float(abs(amp) ** 2) for x, (_, amp) in closed_form_amplitudes(t, state).items()}
