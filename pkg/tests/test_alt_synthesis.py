import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import bisect_a_max, random_ket, random_nonsimple_rank1, random_psd, random_simple_rank1
from walkpovm.alt_synthesis import a_max, build_coin1_alt, choose_eta, swap_coin, synthesize_alt
from walkpovm.errors import InfeasibleError, InvalidInputError
from walkpovm.fixtures import basis_povm, tetrahedron_povm
from walkpovm.linalg import numerical_rank
from walkpovm.povm import Rank1Povm, decompose_rank1
from walkpovm.synthesis import synthesize
from walkpovm.walk import WalkState, evolve, item_elements

seeds = st.integers(0, 2**32 - 1)


def max_item_error(prog, r):
    return max(np.max(np.abs(A - B)) for A, B in zip(item_elements(prog), r.elements()))


def plus_minus_nonsimple(order):
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    items = [(0.5, plus), (0.5, plus), (1.0, minus)]
    items = [items[k] for k in order]
    return Rank1Povm([w for w, _ in items], [k for _, k in items])


class TestAMax:
    def test_identity(self):
        assert a_max(np.eye(2), np.array([1, 0])) == pytest.approx(1.0)

    def test_diagonal(self):
        assert a_max(np.diag([0.5, 1.0]), np.array([1, 0])) == pytest.approx(0.5)

    def test_tetrahedron_remainder_against_bisection(self):
        r = decompose_rank1(tetrahedron_povm())
        A = np.eye(3) - r.element(0)
        assert a_max(A, r.kets[1]) == pytest.approx(bisect_a_max(A, r.kets[1]), abs=1e-8)

    def test_outside_support(self):
        with pytest.raises(InfeasibleError):
            a_max(np.diag([1.0, 0.0]), np.array([0, 1.0]))

    def test_not_psd(self):
        with pytest.raises(InvalidInputError):
            a_max(np.diag([1.0, -0.5]), np.array([1.0, 0]))

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(1, 6), st.data())
    def test_matches_bisection_and_rank_drop(self, seed, d, data):
        rng = np.random.default_rng(seed)
        rank = data.draw(st.integers(1, d))
        A = random_psd(d, rank, rng)
        psi = A @ random_ket(d, rng)
        psi /= np.linalg.norm(psi)
        am = a_max(A, psi)
        assert abs(am - bisect_a_max(A, psi)) < 1e-8 * max(1.0, am)
        P = np.outer(psi, psi.conj())
        r0 = numerical_rank(A)
        assert numerical_rank(A - am * P, scale=1.0) == r0 - 1
        assert numerical_rank(A - 0.5 * am * P, scale=1.0) == r0


class TestCoin1Alt:
    def test_case_b_identity(self):
        for d in (2, 3, 5):
            C = build_coin1_alt([np.zeros(d)] * (d - 1), d - 1, d)
            np.testing.assert_array_equal(C, np.eye(d))

    def test_forced_complement(self):
        C = build_coin1_alt([np.array([0, 1, 0]), np.array([0, 0, 1])], 0, 3)
        assert abs(abs(C[0, 0]) - 1) < 1e-12
        assert np.max(np.abs(C @ C.conj().T - np.eye(3))) < 1e-12

    def test_orthogonal_to_phi_and_retired_ket(self):
        phi = np.array([1, 1, 0]) / np.sqrt(2)
        eta = choose_eta([phi, np.zeros(3)], 1, 3)
        assert abs(np.vdot(eta, phi)) < 1e-12
        assert eta[2] == 0
        C = build_coin1_alt([phi, np.zeros(3)], 1, 3)
        np.testing.assert_allclose(C[0], eta.conj(), atol=1e-15)
        np.testing.assert_array_equal(C[2], [0, 0, 1])
        np.testing.assert_array_equal(C[:, 2], [0, 0, 1])

    def test_span_too_large(self):
        with pytest.raises(InfeasibleError):
            choose_eta([np.array([1, 0, 0]), np.array([0, 1, 0])], 1, 3)

    def test_bad_counter(self):
        with pytest.raises(InvalidInputError):
            choose_eta([np.zeros(2)], 2, 2)


def test_swap_coin():
    np.testing.assert_array_equal(swap_coin(4, 1), np.eye(4)[[0, 3, 2, 1]])
    np.testing.assert_array_equal(swap_coin(3, 2), np.eye(3))


class TestSynthesizeAlt:
    def test_basis_measurement(self):
        r = decompose_rank1(basis_povm(2))
        prog, trace = synthesize_alt(r)
        rec = trace.records[0]
        assert rec.a_tilde == pytest.approx(1.0)
        assert rec.theta == 0.0
        assert rec.j_end == 1
        assert max_item_error(prog, r) < 1e-12

    def test_tetrahedron(self):
        r = decompose_rank1(tetrahedron_povm())
        prog, _ = synthesize_alt(r)
        assert max_item_error(prog, r) < 1e-9

    @pytest.mark.parametrize("order", [(0, 1, 2), (2, 0, 1), (0, 2, 1)])
    def test_nonsimple_plus_minus(self, order):
        r = plus_minus_nonsimple(order)
        prog, trace = synthesize_alt(r)
        assert max_item_error(prog, r) < 1e-12
        for rec in trace.records:
            assert rec.rank_gamma == 2 - rec.j_end

    def test_case_b_reached(self):
        # |-><-| first retires one coin state; the two |+> halves then run with j = d - 1
        r = plus_minus_nonsimple((2, 0, 1))
        _, trace = synthesize_alt(r)
        assert numerical_rank(trace.records[1].gamma_prev) == 1
        assert trace.records[1].j_start == 1
        assert trace.records[1].a_tilde == pytest.approx(1.0)
        assert trace.records[1].not_applied
        assert np.cos(trace.records[1].theta) == pytest.approx(np.sqrt(0.5))
        np.testing.assert_array_equal(trace.records[1].coin1, np.eye(2))

    def test_deterministic(self):
        r = random_simple_rank1(3, 6, np.random.default_rng(4))
        assert synthesize_alt(r)[0] == synthesize_alt(r)[0]


def random_alt_case(seed, nonsimple):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 6))
    if nonsimple:
        return rng, random_nonsimple_rank1(d, int(rng.integers(d, d + 4)), rng)
    return rng, random_simple_rank1(d, int(rng.integers(max(2, d), 13)), rng)


@settings(max_examples=50, deadline=None)
@given(seeds, st.booleans())
def test_correctness_and_counter(seed, nonsimple):
    _, r = random_alt_case(seed, nonsimple)
    prog, trace = synthesize_alt(r)
    assert max_item_error(prog, r) < 1e-9
    for i, rec in enumerate(trace.records):
        assert rec.j_end <= r.dim - 1
        assert rec.rank_gamma == r.dim - rec.j_end
        assert abs(rec.a_tilde - bisect_a_max(rec.gamma_prev, r.kets[i])) < 1e-8


@settings(max_examples=30, deadline=None)
@given(seeds, st.booleans())
def test_retired_kets_stay_empty(seed, nonsimple):
    """After an iteration ending with counter j, coins d-j..d-1 at x = 0 are empty for every input."""
    _, r = random_alt_case(seed, nonsimple)
    prog, trace = synthesize_alt(r)
    d = r.dim
    states = list(evolve(prog, WalkState.initial(np.eye(d, dtype=complex))))
    k = 0
    for rec in trace.records:
        k += 2 + (1 if (rec.not_applied or rec.coin3 is not None) else 0)
        at0 = states[k - 1].at(0)
        if rec.j_end >= 1:
            assert np.max(np.abs(at0[d - rec.j_end:])) < 1e-9
        assert states[k - 1].mass_below(-1) == 0.0


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_agrees_with_main_algorithm(seed):
    _, r = random_alt_case(seed, False)
    main, _ = synthesize(r)
    alt, _ = synthesize_alt(r)
    for A, B in zip(item_elements(main), item_elements(alt)):
        assert np.max(np.abs(A - B)) < 1e-9
