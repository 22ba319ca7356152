"""JSON file formats for POVMs, walk schedules and coin states.

Complex numbers are ``[re, im]`` pairs, matrices are row-major lists of rows.
Floats are written with Python's shortest round-trip repr, so
write -> read -> write is byte-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import FormatError, WalkPovmError
from .povm import Povm
from .program import CoinLayer, WalkProgram


def _encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_matrix(M: np.ndarray) -> list:
    return [[_encode_complex(z) for z in row] for row in np.asarray(M, dtype=complex)]


def encode_ket(v: np.ndarray) -> list:
    return [_encode_complex(z) for z in np.asarray(v, dtype=complex)]


def _decode_complex(obj: Any) -> complex:
    if (
        not isinstance(obj, list)
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise FormatError(f"expected [re, im], got {obj!r}")
    if not all(math.isfinite(x) for x in obj):
        raise FormatError("non-finite number")
    return complex(obj[0], obj[1])


def decode_matrix(obj: Any, d: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise FormatError("matrix must be a non-empty list of rows")
    if len({len(r) for r in obj}) != 1 or not obj[0]:
        raise FormatError("matrix rows must be non-empty and of equal length")
    M = np.array([[_decode_complex(z) for z in row] for row in obj], dtype=complex)
    if d is not None and M.shape != (d, d):
        raise FormatError(f"expected a {d}x{d} matrix, got {M.shape}")
    return M


def decode_ket(obj: Any, d: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise FormatError("ket must be a non-empty list")
    v = np.array([_decode_complex(z) for z in obj], dtype=complex)
    if d is not None and v.shape[0] != d:
        raise FormatError(f"expected {d} amplitudes, got {v.shape[0]}")
    return v


def _field(doc: Any, key: str, kind: type | tuple) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
        raise FormatError(f"field {key!r} has the wrong type")
    return val


def _dim(doc: Any) -> int:
    d = _field(doc, "dim", int)
    if isinstance(d, bool) or d < 1:
        raise FormatError("dim must be a positive integer")
    return d


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc


def _read(path) -> Any:
    try:
        return _loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


# POVM files

def povm_to_doc(p: Povm) -> dict:
    return {"dim": p.dim, "elements": [encode_matrix(E) for E in p.elements]}


def povm_from_doc(doc: Any) -> Povm:
    d = _dim(doc)
    elements = _field(doc, "elements", list)
    if not elements:
        raise FormatError("a POVM needs at least one element")
    return Povm([decode_matrix(E, d) for E in elements])


def write_povm(p: Povm, path) -> None:
    Path(path).write_text(dumps(povm_to_doc(p)))


def read_povm(path) -> Povm:
    return povm_from_doc(_read(path))


# schedule files

def _layer_to_doc(layer: CoinLayer) -> dict:
    return {
        "translate": layer.translate,
        "coins": [{"position": x, "matrix": encode_matrix(C)} for x, C in layer.coins.items()],
    }


def _layer_from_doc(doc: Any, d: int) -> CoinLayer:
    translate = _field(doc, "translate", bool)
    coins = {}
    for entry in _field(doc, "coins", list):
        x = _field(entry, "position", int)
        if x in coins:
            raise FormatError(f"position {x} listed twice in one layer")
        coins[x] = decode_matrix(_field(entry, "matrix", list), d)
    return CoinLayer(coins, translate)


def program_to_doc(prog: WalkProgram) -> dict:
    doc: dict[str, Any] = {
        "dim": prog.dim,
        "layers": [_layer_to_doc(layer) for layer in prog.layers],
        "outcome_positions": [
            {"position": x, "outcome": i} for x, i in prog.outcome_positions.items()
        ],
    }
    if prog.post_layer is not None:
        doc["post_layer"] = _layer_to_doc(prog.post_layer)
    if prog.outcome_map is not None:
        doc["outcome_map"] = list(prog.outcome_map)
    return doc


def program_from_doc(doc: Any) -> WalkProgram:
    d = _dim(doc)
    layers = [_layer_from_doc(layer, d) for layer in _field(doc, "layers", list)]
    outcome_positions: dict[int, int] = {}
    for entry in _field(doc, "outcome_positions", list):
        x = _field(entry, "position", int)
        if x in outcome_positions:
            raise FormatError(f"outcome position {x} listed twice")
        outcome_positions[x] = _field(entry, "outcome", int)
    items = sorted(outcome_positions.values())
    if items != list(range(len(items))):
        raise FormatError("outcome indices must be 0..n-1, each used once")
    post = None
    if "post_layer" in doc:
        post = _layer_from_doc(doc["post_layer"], d)
        if post.translate:
            raise FormatError("post_layer must not translate")
    omap = None
    if "outcome_map" in doc:
        omap = _field(doc, "outcome_map", list)
        if len(omap) != len(items) or not all(
            isinstance(o, int) and not isinstance(o, bool) and o >= 0 for o in omap
        ):
            raise FormatError("outcome_map must list one non-negative outcome per item")
    try:
        prog = WalkProgram(d, layers, outcome_positions, post, omap)
        prog.check()
    except WalkPovmError as exc:
        raise FormatError(str(exc)) from exc
    return prog


def write_program(prog: WalkProgram, path) -> None:
    Path(path).write_text(dumps(program_to_doc(prog)))


def read_program(path) -> WalkProgram:
    return program_from_doc(_read(path))


# state files

def state_to_doc(psi) -> dict:
    psi = np.asarray(psi, dtype=complex)
    return {"dim": int(psi.shape[0]), "amplitudes": encode_ket(psi)}


def state_from_doc(doc: Any) -> np.ndarray:
    d = _dim(doc)
    return decode_ket(_field(doc, "amplitudes", list), d)


def write_state(psi, path) -> None:
    Path(path).write_text(dumps(state_to_doc(psi)))


def read_state(path) -> np.ndarray:
    return state_from_doc(_read(path))
