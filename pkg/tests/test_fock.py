import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlq.errors import DimensionMismatchError, InvalidTruncationError, OutOfRangeError
from nlq.fock import (
    FockBasis,
    ModeOperators,
    OperatorMatrix,
    coherent_state,
    commutator,
    embed,
    expectation,
    identity,
    make_ladder,
    number_operator,
    number_state,
)


def test_ladder_nmax1():
    a, ad = make_ladder(1)
    np.testing.assert_array_equal(a.toarray(), [[0, 1], [0, 0]])
    np.testing.assert_array_equal(ad.toarray(), [[0, 0], [1, 0]])


def test_number_operator_from_ladder():
    a, ad = make_ladder(3)
    np.testing.assert_allclose((ad @ a).toarray(), np.diag([0, 1, 2, 3]), atol=1e-14)


def test_commutator_boundary_term():
    # direct multiplication: [a, a^dag] = diag(1, 1, -2) for n_max = 2
    a, ad = make_ladder(2)
    np.testing.assert_allclose(commutator(a, ad).toarray(), np.diag([1, 1, -2]), atol=1e-15)


@pytest.mark.parametrize("n_max", range(1, 12))
def test_canonical_commutator_below_cutoff(n_max):
    a, ad = make_ladder(n_max)
    c = commutator(a, ad).toarray()
    np.testing.assert_allclose(c[:n_max, :n_max], np.eye(n_max), atol=1e-13)
    assert abs(c[n_max, n_max] + n_max) < 1e-13


def test_truncation_policy():
    a, ad = make_ladder(4)
    vac = np.eye(5)[0]
    top = np.eye(5)[4]
    assert np.all(a.entries @ vac == 0)
    assert np.all(ad.entries @ top == 0)
    np.testing.assert_array_equal(ad.toarray(), a.toarray().conj().T)


@pytest.mark.parametrize("bad", [0, -1, 1.5])
def test_invalid_truncation(bad):
    with pytest.raises(InvalidTruncationError):
        make_ladder(bad)
    with pytest.raises(InvalidTruncationError):
        FockBasis((bad, 1))


def test_embed_identity():
    basis = FockBasis((2, 1, 3))
    for i, n in enumerate(basis.truncations):
        e = embed(identity(n + 1), i, basis)
        np.testing.assert_array_equal(e.toarray(), np.eye(basis.dim))


def test_embed_number_two_modes():
    basis = FockBasis((1, 1))
    e = embed(number_operator(1), 0, basis)
    np.testing.assert_array_equal(e.toarray(), np.diag([0, 0, 1, 1]))


def test_embed_hop():
    # |1,0> is index 2, |0,1> is index 1 in lexicographic order
    basis = FockBasis((1, 1))
    a, ad = make_ladder(1)
    hop = embed(a, 0, basis) @ embed(ad, 1, basis)
    psi = number_state((1, 0), basis).amplitudes
    np.testing.assert_array_equal(hop.entries @ psi, number_state((0, 1), basis).amplitudes)


def test_embed_errors():
    basis = FockBasis((2, 2))
    a, _ = make_ladder(3)
    with pytest.raises(DimensionMismatchError):
        embed(a, 0, basis)
    with pytest.raises(OutOfRangeError):
        embed(make_ladder(2)[0], 2, basis)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=3), st.data())
def test_embed_preserves_hermiticity(truncs, data):
    basis = FockBasis(tuple(truncs))
    i = data.draw(st.integers(0, len(truncs) - 1))
    a, ad = make_ladder(truncs[i])
    herm = embed(a + ad, i, basis)
    non = embed(a, i, basis)
    assert np.array_equal(herm.toarray(), herm.toarray().conj().T)
    assert not np.array_equal(non.toarray(), non.toarray().conj().T)


@given(st.lists(st.integers(1, 3), min_size=2, max_size=3), st.data())
def test_distinct_mode_embeds_commute(truncs, data):
    basis = FockBasis(tuple(truncs))
    i, j = data.draw(st.permutations(range(len(truncs))))[:2]
    ops = ModeOperators(basis)
    for A in (ops.a[i], ops.a_dag[i], ops.n[i]):
        for B in (ops.a[j], ops.a_dag[j]):
            assert np.abs(commutator(A, B).entries.data).max(initial=0.0) == 0.0


@pytest.mark.parametrize(
    "occ,truncs,index",
    [((0, 0, 0), (2, 2, 2), 0), ((1, 0, 0), (2, 2, 2), 9), ((2, 2, 2), (2, 2, 2), 26)],
)
def test_number_state_index(occ, truncs, index):
    psi = number_state(occ, FockBasis(truncs)).amplitudes
    assert psi[index] == 1 and np.count_nonzero(psi) == 1


def test_number_state_out_of_range():
    with pytest.raises(OutOfRangeError):
        number_state((3, 0), FockBasis((2, 2)))


@given(st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_index_bijection(truncs):
    basis = FockBasis(tuple(truncs))
    seen = set()
    for occ in np.ndindex(*basis.local_dims):
        idx = basis.index(occ)
        assert basis.occupations(idx) == occ
        seen.add(idx)
    assert seen == set(range(basis.dim))


def _poisson(mean, n_max):
    return np.array([math.exp(-mean) * mean**n / math.factorial(n) for n in range(n_max + 1)])


def test_coherent_vacuum():
    psi, tail = coherent_state(0, 5)
    np.testing.assert_array_equal(psi.amplitudes, np.eye(6)[0])
    assert tail == 0


def test_coherent_mean_photon_number():
    psi, tail = coherent_state(1.0, 16)
    p = _poisson(1.0, 16)
    oracle = np.sum(np.arange(17) * p) / p.sum()
    n_op = number_operator(16)
    assert abs(expectation(psi, n_op) - 1.0) < 1e-6
    assert abs(expectation(psi, n_op).real - oracle) < 1e-12
    assert tail < 1e-12


def test_coherent_tail_reported():
    _, tail = coherent_state(2.0, 4)
    oracle = 1 - _poisson(4.0, 4).sum()
    assert tail > 0.05
    assert abs(tail - oracle) < 1e-12


def test_coherent_amplitude_expectation():
    psi, _ = coherent_state(1.0, 16)
    a, _ = make_ladder(16)
    assert abs(expectation(psi, a) - 1.0) < 1e-6
    # complex phase carried through
    psi, _ = coherent_state(0.5j, 16)
    assert abs(expectation(psi, a) - 0.5j) < 1e-9


def test_expectation_basics():
    basis = FockBasis((4,))
    n_op = number_operator(4)
    for n in range(5):
        assert expectation(number_state((n,), basis), n_op) == n
    with pytest.raises(DimensionMismatchError):
        expectation(number_state((0,), basis), number_operator(3))


def test_hermitian_hint_enforced():
    a, _ = make_ladder(2)
    with pytest.raises(ValueError):
        OperatorMatrix(a.entries, hermitian_hint=True)
