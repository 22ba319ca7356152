"""Walk programs: schedules of position-dependent coin layers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidInputError
from .linalg import as_matrix, is_unitary


def not_coin(d: int) -> np.ndarray:
    """Swap of ``|0>`` and ``|1>``, identity on the other coin states."""
    C = np.eye(d, dtype=complex)
    C[:2, :2] = [[0, 1], [1, 0]]
    return C


def reflection_coin(d: int, cos_part: float, sin_part: float) -> np.ndarray:
    """``[[c, s], [s, -c]]`` on ``|0>, |1>`` and identity elsewhere."""
    C = np.eye(d, dtype=complex)
    C[:2, :2] = [[cos_part, sin_part], [sin_part, -cos_part]]
    return C


@dataclass(eq=False)
class CoinLayer:
    """Coins keyed by position; unlisted positions get the identity.

    ``translate`` says whether the conditional shift follows the coins.
    """

    coins: dict = field(default_factory=dict)
    translate: bool = True

    def __post_init__(self):
        self.coins = {int(x): as_matrix(C, f"coin at {x}") for x, C in sorted(self.coins.items())}
        self.translate = bool(self.translate)

    def check(self, d: int, tol: float = 1e-10) -> None:
        for x, C in self.coins.items():
            if C.shape != (d, d):
                raise InvalidInputError(f"coin at position {x} has shape {C.shape}, expected {d}x{d}")
            if not is_unitary(C, tol):
                raise InvalidInputError(f"coin at position {x} is not unitary")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoinLayer):
            return NotImplemented
        return (
            self.translate == other.translate
            and self.coins.keys() == other.coins.keys()
            and all(np.array_equal(C, other.coins[x]) for x, C in self.coins.items())
        )


@dataclass(eq=False)
class WalkProgram:
    """A walk started at position 0.

    ``outcome_positions`` maps final walker positions to rank-1 item indices, and
    ``outcome_map`` (item -> original POVM outcome) defaults to the identity.
    """

    dim: int
    layers: list
    outcome_positions: dict
    post_layer: CoinLayer | None = None
    outcome_map: tuple | None = None

    def __post_init__(self):
        self.dim = int(self.dim)
        if self.dim < 2:
            raise InvalidInputError("coin dimension must be at least 2")
        self.layers = list(self.layers)
        self.outcome_positions = {int(x): int(i) for x, i in sorted(self.outcome_positions.items())}
        if self.outcome_map is not None:
            self.outcome_map = tuple(int(o) for o in self.outcome_map)
        if self.post_layer is not None and self.post_layer.translate:
            raise InvalidInputError("the post layer is never followed by a translation")

    @property
    def n_translations(self) -> int:
        return sum(1 for layer in self.layers if layer.translate)

    @property
    def n_items(self) -> int:
        return len(self.outcome_positions)

    def all_layers(self) -> list:
        return self.layers + ([self.post_layer] if self.post_layer is not None else [])

    def item_outcome(self, item: int) -> int:
        return item if self.outcome_map is None else self.outcome_map[item]

    def check(self, tol: float = 1e-10) -> None:
        for layer in self.all_layers():
            layer.check(self.dim, tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WalkProgram):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.layers == other.layers
            and self.outcome_positions == other.outcome_positions
            and self.post_layer == other.post_layer
            and self.outcome_map == other.outcome_map
        )


def make_program(
    dim: int,
    layers: Sequence[Mapping[int, np.ndarray]],
    outcome_positions: Mapping[int, int],
) -> WalkProgram:
    """Shorthand for a program whose layers all translate."""
    return WalkProgram(dim, [CoinLayer(dict(c)) for c in layers], dict(outcome_positions))
