"""Small reference measurements: the four-outcome qutrit tetrahedron and friends."""

from __future__ import annotations

import numpy as np

from .povm import Povm
from .program import CoinLayer, WalkProgram, not_coin


def tetrahedron_kets() -> list[np.ndarray]:
    """``psi_i = sum_j (-1)^{[i == j + 2]} |j> / sqrt(3)`` for ``i = 1..4``."""
    kets = []
    for i in range(1, 5):
        v = np.array([(-1.0) ** (i == j + 2) for j in range(3)], dtype=complex)
        kets.append(v / np.sqrt(3))
    return kets


def tetrahedron_povm() -> Povm:
    return Povm([0.75 * np.outer(v, v.conj()) for v in tetrahedron_kets()])


def tetrahedron_hand_program() -> WalkProgram:
    """The hand-built six-step schedule; positions 6, 4, 2, 0 carry items 0..3."""
    r2, r3, r6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)
    c01 = np.array([[1 / r3, 1 / r3, 1 / r3], [1 / r6, 1 / r6, -2 / r6], [1 / r2, -1 / r2, 0]])
    c12 = np.array([[r3 / 2, 0.5, 0], [0.5, -r3 / 2, 0], [0, 0, 1]])
    c03 = np.array(
        [[-1 / r6, 1 / r3, -1 / r2], [-1 / r6, 1 / r3, 1 / r2], [np.sqrt(2 / 3), 1 / r3, 0]]
    )
    NOT = not_coin(3)
    layers = [
        CoinLayer({0: c01}),
        CoinLayer({-1: NOT, 1: c12}),
        CoinLayer({0: c03}),
        CoinLayer({-1: NOT}),
        CoinLayer({}),
        CoinLayer({-1: NOT}),
    ]
    return WalkProgram(3, layers, {6: 0, 4: 1, 2: 2, 0: 3})


def basis_povm(d: int = 2) -> Povm:
    return Povm([np.diag(np.eye(d)[k]).astype(complex) for k in range(d)])
