import random
from fractions import Fraction as F

import hypothesis.strategies as st
import pytest
from conftest import small_fractions
from hypothesis import given

from hankel_moment import (
    AtomicMeasure,
    CoverageError,
    GeneratingVector,
    InconsistencyError,
    MultidimensionalSequence,
    generating_vector_from_sequence,
    is_hankel_sequence,
    moments_of_measure,
    multidim_moment,
    pushforward_atoms,
    sequence_from_generating_vector,
    weighted_degree,
)
from hankel_moment.sequence import check_multi_index, multi_indices

GOOD_TABLE = {(0, 0): 1, (1, 0): 2, (2, 0): 5, (0, 1): 5, (1, 1): 7, (0, 2): 9}


@pytest.mark.parametrize("j,expected", [((2, 0), 2), ((0, 1), 2), ((1, 1, 1), 6)])
def test_weighted_degree(j, expected):
    assert weighted_degree(j) == expected


def test_multi_index_rejects_negative_and_wrong_length():
    with pytest.raises(ValueError):
        check_multi_index((1, -1), 3)
    with pytest.raises(ValueError):
        check_multi_index((1,), 3)


def test_multi_indices_counts():
    # number of (n-1)-tuples with total degree <= d is C(n-1+d, d)
    assert len(list(multi_indices(3, 2))) == 6
    assert len(list(multi_indices(4, 3))) == 20


def test_hankel_table_accepted():
    S = MultidimensionalSequence(3, table=GOOD_TABLE, max_degree=2)
    assert is_hankel_sequence(S, 2) == (True, None)


def test_hankel_table_violation_pair():
    S = MultidimensionalSequence(3, table={**GOOD_TABLE, (0, 1): 6}, max_degree=2)
    assert is_hankel_sequence(S, 2) == (False, ((2, 0), (0, 1)))


def test_rule_backed_is_hankel():
    S = sequence_from_generating_vector(GeneratingVector([3, 1, 4, 1, 5]), 3)
    assert is_hankel_sequence(S, 2)[0]


def test_table_must_cover_declared_degree():
    table = dict(GOOD_TABLE)
    del table[(1, 1)]
    with pytest.raises(CoverageError):
        MultidimensionalSequence(3, table=table, max_degree=2)


def test_float_table_within_tolerance():
    table = {k: float(v) for k, v in GOOD_TABLE.items()}
    table[(0, 1)] = 5.0 * (1 + 1e-14)
    assert is_hankel_sequence(MultidimensionalSequence(3, table=table, max_degree=2), 2)[0]
    table[(0, 1)] = 5.0 * (1 + 1e-9)
    assert not is_hankel_sequence(MultidimensionalSequence(3, table=table, max_degree=2), 2)[0]


@given(st.randoms())
def test_hankel_check_ignores_table_order(rnd):
    items = list({**GOOD_TABLE, (0, 1): 6}.items())
    rnd.shuffle(items)
    S = MultidimensionalSequence(3, table=dict(items), max_degree=2)
    assert is_hankel_sequence(S, 2) == (False, ((2, 0), (0, 1)))
    items = list(GOOD_TABLE.items())
    rnd.shuffle(items)
    assert is_hankel_sequence(MultidimensionalSequence(3, table=dict(items), max_degree=2), 2)[0]


def test_generating_vector_from_constant_rule():
    S = sequence_from_generating_vector(GeneratingVector([1] * 10), 3)
    assert generating_vector_from_sequence(S, 4).values == (1, 1, 1, 1, 1)


def test_generating_vector_hilbert_n2():
    table = {(k,): F(1, k + 1) for k in range(4)}
    S = MultidimensionalSequence(2, table=table, max_degree=3)
    assert generating_vector_from_sequence(S, 3).values == (1, F(1, 2), F(1, 3), F(1, 4))


def test_generating_vector_from_table():
    S = MultidimensionalSequence(3, table=GOOD_TABLE, max_degree=2)
    assert generating_vector_from_sequence(S, 2).values == (1, 2, 5)


def test_generating_vector_inconsistent_table():
    S = MultidimensionalSequence(3, table={**GOOD_TABLE, (0, 1): 6}, max_degree=2)
    with pytest.raises(InconsistencyError):
        generating_vector_from_sequence(S, 2)


def test_sequence_from_generating_vector_lookups():
    assert sequence_from_generating_vector(GeneratingVector([1, 0, 2]), 3)[(0, 1)] == 2
    assert sequence_from_generating_vector(GeneratingVector([1, 1, 1]), 2)[(2,)] == 1
    with pytest.raises(CoverageError):
        sequence_from_generating_vector(GeneratingVector([1, 2]), 3)[(0, 1)]


@given(st.lists(small_fractions, min_size=1, max_size=12), st.integers(2, 5))
def test_round_trip_generating_vector(vals, n):
    v = GeneratingVector(vals)
    assert generating_vector_from_sequence(sequence_from_generating_vector(v, n), v.L) == v


def test_pushforward_examples():
    assert pushforward_atoms(AtomicMeasure(((2, 1),)), 3) == [((2, 4), 1)]
    assert pushforward_atoms(AtomicMeasure(((0, 1),)), 4) == [((0, 0, 0), 1)]
    got = pushforward_atoms(AtomicMeasure(((1, 0.5), (-1, 0.5))), 3)
    assert got == [((-1.0, 1.0), 0.5), ((1.0, 1.0), 0.5)]


def test_multidim_moment_examples():
    assert multidim_moment([((2, 4), 1)], (1, 1)) == 8
    assert multidim_moment([((1, 1), 0.5), ((-1, 1), 0.5)], (2, 0)) == 1
    assert multidim_moment([((0, 0), 3)], (0, 0)) == 3


def test_atomic_measure_normalization():
    mu = AtomicMeasure(((1, 2), (0, 0), (-1, 1)))
    assert mu.atoms == ((-1, 1), (1, 2))
    merged = AtomicMeasure(((1.0, 1.0), (1.0 + 1e-12, 1.0)))
    assert len(merged) == 1 and merged.weights[0] == 2.0
    with pytest.raises(ValueError):
        AtomicMeasure(((0, -1),))


atoms_strategy = st.lists(
    st.tuples(st.fractions(-2, 2, max_denominator=8), st.fractions(F(1, 8), 2, max_denominator=8)),
    min_size=1, max_size=4)


@given(atoms_strategy, st.integers(2, 4), st.integers(0, 3))
def test_pushforward_moments_match_generating_vector(atoms, n, d):
    mu = AtomicMeasure(tuple(atoms))
    L = (n - 1) * d
    v = moments_of_measure(mu, L)
    pts = pushforward_atoms(mu, n)
    for j in multi_indices(n, d):
        assert multidim_moment(pts, j) == v[weighted_degree(j)]


def test_pushforward_moments_float_relative():
    rnd = random.Random(3)
    for _ in range(20):
        mu = AtomicMeasure(tuple((rnd.uniform(-2, 2), rnd.uniform(0.1, 2)) for _ in range(3)))
        v = moments_of_measure(mu, 9)
        pts = pushforward_atoms(mu, 4)
        for j in multi_indices(4, 3):
            got, want = multidim_moment(pts, j), v[weighted_degree(j)]
            assert abs(got - want) <= 1e-10 * max(1.0, abs(want))
