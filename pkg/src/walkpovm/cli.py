"""Command-line driver: synthesize, verify, simulate, sic.

Standard output is line-oriented ``key=value``. Exit codes: 0 success,
1 invalid POVM or verification mismatch, 2 malformed input or infeasible synthesis.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import fileformat, sic
from .alt_synthesis import synthesize_alt
from .errors import FormatError, InfeasibleError, InvalidInputError, WalkPovmError
from .povm import decompose_rank1, validate
from .synthesis import synthesize
from .walk import induced_povm, outcome_elements, run, sample, unassigned_weight

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2

VALIDATION_TOL = 1e-10
VERIFY_TOL = 1e-9


def _emit(out, **fields) -> None:
    print(" ".join(f"{k}={v}" for k, v in fields.items()), file=out)


def _fmt(x: float) -> str:
    return format(x, ".12g")


def _report_fields(report) -> dict:
    return {
        "hermiticity_residual": _fmt(report.hermiticity_residual),
        "psd_violation": _fmt(report.psd_violation),
        "completeness_residual": _fmt(report.completeness_residual),
    }


def cmd_synthesize(povm_path, algo: str = "main", out_path=None,
                   tol: float = VALIDATION_TOL, out=None) -> int:
    try:
        p = fileformat.read_povm(povm_path)
    except FormatError as exc:
        _emit(out, error="malformed_povm", detail=repr(str(exc)))
        return EXIT_BAD_INPUT
    report = validate(p, tol)
    if not report:
        _emit(out, error="invalid_povm", **_report_fields(report))
        return EXIT_FAIL
    try:
        r = decompose_rank1(p, tol)
        if algo == "main":
            prog, _ = synthesize(r, tol)
        elif algo == "alt":
            prog, _ = synthesize_alt(r, tol)
        else:
            raise InvalidInputError(f"unknown algorithm {algo!r}")
    except InfeasibleError as exc:
        _emit(out, error="infeasible", detail=repr(str(exc)))
        return EXIT_BAD_INPUT
    except InvalidInputError as exc:
        _emit(out, error="invalid_povm", detail=repr(str(exc)))
        return EXIT_FAIL
    if out_path is not None:
        fileformat.write_program(prog, out_path)
    _emit(out, algo=algo, dim=prog.dim, layers=len(prog.layers),
          translations=prog.n_translations, items=prog.n_items, outcomes=len(p))
    for x, item in prog.outcome_positions.items():
        _emit(out, position=x, item=item, outcome=prog.item_outcome(item))
    return EXIT_OK


def cmd_verify(povm_path, schedule_path, tol: float = VERIFY_TOL,
               validation_tol: float = VALIDATION_TOL, out=None) -> int:
    try:
        p = fileformat.read_povm(povm_path)
        prog = fileformat.read_program(schedule_path)
    except FormatError as exc:
        _emit(out, error="malformed_input", detail=repr(str(exc)))
        return EXIT_BAD_INPUT
    report = validate(p, validation_tol)
    if not report:
        _emit(out, error="invalid_povm", **_report_fields(report))
        return EXIT_FAIL
    if prog.dim != p.dim:
        _emit(out, error="dimension_mismatch", povm_dim=p.dim, schedule_dim=prog.dim)
        return EXIT_FAIL
    induced = induced_povm(prog)
    try:
        realized = outcome_elements(prog, len(p), induced)
    except InvalidInputError as exc:
        _emit(out, error="outcome_mismatch", detail=repr(str(exc)))
        return EXIT_FAIL
    deviations = [float(np.max(np.abs(R - E))) for R, E in zip(realized, p.elements)]
    stray = unassigned_weight(prog, induced)
    for k, dev in enumerate(deviations):
        _emit(out, outcome=k, deviation=_fmt(dev))
    worst = max(deviations + [stray])
    ok = worst <= tol
    _emit(out, unassigned_weight=_fmt(stray), max_deviation=_fmt(worst),
          result="pass" if ok else "fail")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_simulate(schedule_path, state_path, shots: int = 0, seed: int = 0,
                 out=None) -> int:
    try:
        prog = fileformat.read_program(schedule_path)
        psi = fileformat.read_state(state_path)
        if shots < 0:
            raise InvalidInputError("shots must be non-negative")
        _, probs = run(prog, psi)
        counts = sample(prog, psi, shots, seed) if shots > 0 else None
    except (FormatError, InvalidInputError) as exc:
        _emit(out, error="malformed_input", detail=repr(str(exc)))
        return EXIT_BAD_INPUT
    for x in sorted(probs, reverse=True):
        if probs[x] > 0:
            _emit(out, position=x, probability=_fmt(probs[x]))
    if counts is not None:
        _emit(out, shots=shots, seed=seed)
        for x in sorted(counts, reverse=True):
            _emit(out, position=x, count=counts[x])
    return EXIT_OK


SIC_GRID = tuple(k * np.pi / 6 for k in range(12))


def verify_sic(t: float, tol: float = VERIFY_TOL) -> dict:
    """Check the hand-derived schedule and the compiler against the SIC at ``t``."""
    target = sic.sic_povm(t)
    prog = sic.paper_schedule(t)
    hand_dev = max(float(np.max(np.abs(R - E)))
                    for R, E in zip(outcome_elements(prog, 9), target.elements))
    compiled, trace = synthesize(decompose_rank1(target))
    compiled_dev = max(float(np.max(np.abs(R - E)))
                       for R, E in zip(outcome_elements(compiled, 9), target.elements))
    alpha_dev = float(np.max(np.abs(np.array(trace.alpha_primes) - np.array(sic.ALPHA_PRIMES))))
    states = sic.sic_states(t)
    fid = np.abs(np.array([[np.vdot(u, v) for v in states] for u in states])) ** 2
    fid_dev = float(np.max(np.abs(fid - (3 * np.eye(9) + 1) / 4)))
    ok = (len(prog.layers) == 16 and hand_dev <= tol and compiled_dev <= tol
          and alpha_dev <= 1e-12 and fid_dev <= 1e-10)
    return {"t": t, "layers": len(prog.layers), "hand_coin_deviation": hand_dev,
            "compiled_deviation": compiled_dev, "alpha_deviation": alpha_dev,
            "fidelity_deviation": fid_dev, "ok": ok}


def cmd_sic(t: float | None, action: str, out_path=None, tol: float = VERIFY_TOL,
            out=None) -> int:
    if t is not None and not np.isfinite(t):
        _emit(out, error="t_not_finite")
        return EXIT_BAD_INPUT
    if action == "verify":
        grid = SIC_GRID if t is None else (t,)
        all_ok = True
        for tv in grid:
            res = verify_sic(tv, tol)
            all_ok &= res["ok"]
            _emit(out, t=_fmt(tv), layers=res["layers"],
                  hand_coin_deviation=_fmt(res["hand_coin_deviation"]),
                  compiled_deviation=_fmt(res["compiled_deviation"]),
                  alpha_deviation=_fmt(res["alpha_deviation"]),
                  fidelity_deviation=_fmt(res["fidelity_deviation"]),
                  result="pass" if res["ok"] else "fail")
        return EXIT_OK if all_ok else EXIT_FAIL
    tv = 0.0 if t is None else t
    if action == "emit-povm":
        text = fileformat.dumps(fileformat.povm_to_doc(sic.sic_povm(tv)))
    elif action == "emit-schedule":
        text = fileformat.dumps(fileformat.program_to_doc(sic.paper_schedule(tv)))
    else:
        _emit(out, error="unknown_action", action=action)
        return EXIT_BAD_INPUT
    if out_path is None:
        (out or sys.stdout).write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)
        _emit(out, action=action, t=_fmt(tv), path=out_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkpovm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synthesize", help="compile a POVM file into a schedule file")
    s.add_argument("--povm", required=True, help="POVM JSON file")
    s.add_argument("--algo", choices=("main", "alt"), default="main",
                   help="pseudoinverse compiler (main) or weight-peeling compiler (alt)")
    s.add_argument("--out", help="schedule JSON to write")
    s.add_argument("--tol", type=float, default=VALIDATION_TOL, help="POVM validation tolerance")

    v = sub.add_parser("verify", help="check that a schedule induces a POVM")
    v.add_argument("--povm", required=True, help="target POVM JSON file")
    v.add_argument("--schedule", required=True, help="schedule JSON file")
    v.add_argument("--tol", type=float, default=VERIFY_TOL, help="max-norm deviation allowed per outcome")

    m = sub.add_parser("simulate", help="position distribution for an input coin state")
    m.add_argument("--schedule", required=True, help="schedule JSON file")
    m.add_argument("--state", required=True, help="coin state JSON file")
    m.add_argument("--shots", type=int, default=0, help="also draw this many samples")
    m.add_argument("--seed", type=int, default=0, help="sampling seed")

    c = sub.add_parser("sic", help="qutrit SIC-POVM family")
    c.add_argument("action", choices=("emit-povm", "emit-schedule", "verify"))
    c.add_argument("--t", type=float, help="family parameter (verify: default is a 12-point grid)")
    c.add_argument("--out", help="write JSON here instead of stdout")
    c.add_argument("--tol", type=float, default=VERIFY_TOL)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synthesize":
            return cmd_synthesize(args.povm, args.algo, args.out, args.tol)
        if args.command == "verify":
            return cmd_verify(args.povm, args.schedule, args.tol)
        if args.command == "simulate":
            return cmd_simulate(args.schedule, args.state, args.shots, args.seed)
        return cmd_sic(args.t, args.action, args.out, args.tol)
    except WalkPovmError as exc:
        _emit(sys.stdout, error=type(exc).__name__, detail=repr(str(exc)))
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
