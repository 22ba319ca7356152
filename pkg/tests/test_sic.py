import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_ket
from walkpovm.povm import decompose_rank1, validate
from walkpovm.sic import (
    ALPHA_PRIMES,
    PHASE,
    Q,
    SHIFT,
    closed_form_amplitudes,
    closed_form_probabilities,
    paper_coins,
    paper_schedule,
    sic_povm,
    sic_states,
)
from walkpovm.synthesis import advance_K, coin1, coin2_params, synthesize
from walkpovm.walk import induced_povm, outcome_elements, run

T_GRID = [k * np.pi / 6 for k in range(12)]


def test_fiducial_at_zero():
    np.testing.assert_allclose(sic_states(0.0)[0], np.array([0, 1, -1]) / np.sqrt(2), atol=1e-15)


def test_shift_applied_once():
    states = sic_states(0.0)
    np.testing.assert_allclose(states[3], SHIFT @ states[0], atol=1e-15)
    np.testing.assert_allclose(states[3], np.array([-1, 0, 1]) / np.sqrt(2), atol=1e-15)


def test_generators():
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(np.linalg.matrix_power(SHIFT, 3), np.eye(3))
    assert np.allclose(np.linalg.matrix_power(PHASE, 3), np.eye(3))
    assert np.allclose(PHASE @ SHIFT, w * SHIFT @ PHASE)


@pytest.mark.parametrize("t", T_GRID + [np.pi / 7, 10.0])
def test_pairwise_fidelity(t):
    S = np.array(sic_states(t))
    F = np.abs(S.conj() @ S.T) ** 2
    assert np.max(np.abs(F - (3 * np.eye(9) + 1) / 4)) < 1e-10


@pytest.mark.parametrize("t", [0.0, np.pi / 7, 5.5])
def test_sic_povm_valid(t):
    p = sic_povm(t)
    assert validate(p).passed
    assert np.max(np.abs(sum(p.elements) - np.eye(3))) < 1e-10
    np.testing.assert_allclose([np.trace(E).real for E in p.elements], 1 / 3, atol=1e-15)


def test_periodic_in_t():
    for a, b in zip(sic_states(0.4), sic_states(0.4 + 2 * np.pi)):
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_rejects_non_finite_t():
    with pytest.raises(ValueError):
        sic_states(np.nan)


def test_second_coins_independent_of_t():
    ref = paper_schedule(0.0)
    for t in (1.0, 2.5):
        prog = paper_schedule(t)
        for a, b in zip(ref.layers[1::2], prog.layers[1::2]):
            assert a == b


def test_first_coins_unitary():
    for C in paper_coins(0.9):
        assert np.max(np.abs(C @ C.conj().T - np.eye(3))) < 1e-14


@pytest.mark.parametrize("t", T_GRID)
def test_schedule_induces_sic(t):
    prog = paper_schedule(t)
    assert len(prog.layers) == 16
    for A, B in zip(outcome_elements(prog, 9), sic_povm(t).elements):
        assert np.max(np.abs(A - B)) < 1e-9


@pytest.mark.parametrize("t", T_GRID)
def test_compiler_reproduces_alpha_table_and_sic(t):
    target = sic_povm(t)
    r = decompose_rank1(target)
    prog, trace = synthesize(r)
    np.testing.assert_allclose(trace.alpha_primes, ALPHA_PRIMES, atol=1e-12)
    for A, B in zip(outcome_elements(prog, 9), target.elements):
        assert np.max(np.abs(A - B)) < 1e-9


@pytest.mark.parametrize("t", [0.0, 1.3, 4.0])
def test_hand_coins_follow_the_first_row_rule(t):
    """Given the hand-built history, each displayed coin has the first row the compiler would pick."""
    r = decompose_rank1(sic_povm(t))
    K = np.eye(3, dtype=complex)
    for i, C in enumerate(paper_coins(t)):
        C1, b = coin1(K, r.kets[i])
        assert abs(abs(np.vdot(C1[0], C[0])) - 1) < 1e-12
        alpha, beta = coin2_params(r.weights[i], b)
        assert alpha == pytest.approx(ALPHA_PRIMES[i], abs=1e-12)
        K = advance_K(K, C, beta)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi))
def test_closed_form_final_state(seed, t):
    psi = random_ket(3, np.random.default_rng(seed))
    final, probs = run(paper_schedule(t), psi)
    for x, (c, amp) in closed_form_amplitudes(t, psi).items():
        assert abs(final.at(x)[c] - amp) < 1e-10
    for x, p in closed_form_probabilities(t, psi).items():
        assert abs(probs[x] - p) < 1e-10


def test_closed_form_extremes():
    t = 0.8
    a, b, c = random_ket(3, np.random.default_rng(1))
    probs = closed_form_probabilities(t, [a, b, c])
    assert probs[16] == pytest.approx(abs(b - c * np.exp(-1j * t)) ** 2 / 6)
    assert probs[0] == pytest.approx(abs(a * Q**-4 - b * np.exp(-1j * t)) ** 2 / 6)


def test_final_probabilities_are_born_rule():
    t = 2.2
    psi = random_ket(3, np.random.default_rng(5))
    probs = closed_form_probabilities(t, psi)
    for i, E in enumerate(sic_povm(t).elements):
        assert probs[16 - 2 * i] == pytest.approx(np.vdot(psi, E @ psi).real, abs=1e-12)
