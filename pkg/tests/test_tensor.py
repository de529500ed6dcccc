import itertools
import math
import random
from fractions import Fraction as F

import hypothesis.strategies as st
import numpy as np
import pytest
from conftest import small_fractions
from hypothesis import given

from hankel_moment import (
    DomainError,
    GeneratingVector,
    LengthError,
    MultidimensionalSequence,
    RankOneTerm,
    SymmetricTensor,
    densify,
    hankel_tensor,
    is_hankel,
    moment_curve,
    moment_tensor_from_sequence,
    multinomial_coefficient,
    polynomial_eval,
    rank_one_sum,
    sequence_from_generating_vector,
    tensor_contract,
)
from hankel_moment.sequence import multi_indices
from hankel_moment.tensor import layout


@pytest.mark.parametrize("m,j,expected", [(2, (1,), 2), (3, (1, 1), 6), (4, (2,), 6), (6, (2, 2), 90)])
def test_multinomial_coefficient(m, j, expected):
    assert multinomial_coefficient(m, j) == expected


def test_multinomial_domain_error():
    with pytest.raises(DomainError):
        multinomial_coefficient(2, (2, 1))


@given(st.integers(1, 7), st.integers(2, 5))
def test_multinomials_sum_to_n_power(m, n):
    # sum over |j| <= m of multinomial(m, j) is n^m
    total = sum(multinomial_coefficient(m, j) for j in multi_indices(n, m))
    assert total == n ** m


@given(st.integers(1, 6), st.integers(1, 4))
def test_layout_size_and_multiplicity(m, n):
    lay = layout(n, m)
    assert len(lay.indices) == math.comb(n + m - 1, m)
    assert sum(lay.multiplicity) == n ** m
    assert all(list(i) == sorted(i) for i in lay.indices)


def test_symmetric_lookup_is_order_free():
    A = SymmetricTensor.from_function(3, 3, lambda idx: sum(10 ** k * i for k, i in enumerate(idx)))
    for idx in itertools.permutations((0, 1, 2)):
        assert A[idx] == A[(0, 1, 2)]


def test_moment_tensor_two_by_two():
    S = MultidimensionalSequence(2, table={(0,): 1, (1,): 2, (2,): 5}, max_degree=2)
    A = moment_tensor_from_sequence(S, 2)
    assert (A[(0, 0)], A[(0, 1)], A[(1, 1)]) == (1, 2, 5)


def test_moment_tensor_via_rule():
    S = sequence_from_generating_vector(GeneratingVector([1, 0, 2, 0, 7]), 3)
    assert moment_tensor_from_sequence(S, 2)[(1, 2)] == 0


def test_moment_tensor_constant():
    S = sequence_from_generating_vector(GeneratingVector([1] * 13), 4)
    assert set(moment_tensor_from_sequence(S, 4).values) == {1}


def test_hankel_tensor_examples():
    A = densify(hankel_tensor(GeneratingVector([0, 1, 2, 3, 4]), 3, 2))
    assert all(A[(i, j)] == i + j for i in range(3) for j in range(3))
    assert set(densify(hankel_tensor(GeneratingVector([1] * 5), 3, 2)).values) == {1}
    with pytest.raises(LengthError):
        hankel_tensor(GeneratingVector([1, 2, 3]), 3, 2)


def test_hankel_tensor_ignores_tail():
    v = GeneratingVector([1, 2, 3, 4, 5, 99, 100])
    assert densify(hankel_tensor(v, 3, 2)) == densify(hankel_tensor(v.prefix(4), 3, 2))


def test_is_hankel_examples():
    assert is_hankel(SymmetricTensor(2, 2, (0, 1, 0)))
    # order: (0,0),(0,1),(0,2),(1,1),(1,2),(2,2)
    assert not is_hankel(SymmetricTensor(2, 3, (0, 0, 1, 0, 0, 0)))


def test_rank_one_sum_examples():
    assert rank_one_sum([RankOneTerm((1, 1))], 2, 2).values == (1, 1, 1)
    assert rank_one_sum([RankOneTerm((1, 1)), RankOneTerm((1, -1))], 2, 2).values == (2, 0, 2)
    assert rank_one_sum([], 3, 2).values == (0, 0, 0, 0)


def test_rank_one_sum_matches_outer_products():
    rng = np.random.default_rng(5)
    U, w = rng.normal(size=(3, 3)), rng.uniform(0.1, 1, 3)
    A = rank_one_sum([RankOneTerm(tuple(u), float(x)) for u, x in zip(U, w)], 3, 3)
    full = np.einsum("k,ki,kj,kl->ijl", w, U, U, U)
    assert np.allclose(A.to_full(), full, rtol=1e-13, atol=1e-13)


@given(st.lists(st.fractions(-2, 2, max_denominator=6), min_size=1, max_size=4),
       st.integers(2, 4), st.integers(1, 5))
def test_moment_curve_sums_are_hankel(nodes, n, m):
    terms = [RankOneTerm(moment_curve(t, n), F(1, k + 1)) for k, t in enumerate(nodes)]
    assert is_hankel(rank_one_sum(terms, m, n), tol=0)


def test_contract_examples():
    assert tensor_contract(SymmetricTensor(2, 2, (1, 1, 1)), (1, 1), 2) == 4
    assert tensor_contract(SymmetricTensor(2, 2, (2, 0, 2)), (1, 0), 1).values == (2, 0)
    u, x = (1, 2, -1), (F(1, 2), 3, 1)
    dot = sum(a * b for a, b in zip(u, x))
    assert tensor_contract(rank_one_sum([RankOneTerm(u)], 4, 3), x, 4) == dot ** 4


def test_contract_against_full_einsum():
    rng = np.random.default_rng(11)
    for m, n in [(3, 3), (4, 2), (4, 3)]:
        A = SymmetricTensor.from_function(m, n, lambda idx: float(rng.normal()))
        x = rng.normal(size=n)
        full = A.to_full()
        want_scalar = full
        for _ in range(m):
            want_scalar = want_scalar @ x
        assert abs(tensor_contract(A, x, m) - want_scalar) <= 1e-12 * max(1, abs(want_scalar))
        vec = full
        for _ in range(m - 1):
            vec = vec @ x
        assert np.allclose(tensor_contract(A, x, m - 1).values, vec, rtol=1e-12, atol=1e-12)
        mat = full
        for _ in range(m - 2):
            mat = mat @ x
        B = tensor_contract(A, x, m - 2)
        assert np.allclose(B.to_full(), mat, rtol=1e-12, atol=1e-12)


def test_contract_float_fast_path_matches_exact_loop():
    A = SymmetricTensor.from_function(5, 3, lambda idx: F(sum(idx) ** 2 - 3, 7))
    x = (F(1, 3), F(-2), F(5, 4))
    exact = tensor_contract(A, x, 5)
    fast = tensor_contract(SymmetricTensor(5, 3, tuple(float(a) for a in A.values)),
                           tuple(float(t) for t in x), 5)
    # error scale of a sum is the sum of magnitudes
    mag = tensor_contract(SymmetricTensor(5, 3, tuple(abs(a) for a in A.values)), [abs(t) for t in x], 5)
    assert abs(fast - float(exact)) <= 1e-12 * float(mag)


def test_contract_implicit_hankel_tensor():
    v = GeneratingVector([F(1, k + 1) for k in range(9)])
    H = hankel_tensor(v, 3, 4)
    x = (1, F(1, 2), -1)
    assert tensor_contract(H, x, 4) == tensor_contract(densify(H), x, 4)


def test_contraction_linearity():
    rng = random.Random(2)
    for _ in range(20):
        n, m = rng.randint(2, 4), rng.randint(1, 6)
        terms = [RankOneTerm(tuple(rng.uniform(-1, 1) for _ in range(n)), rng.uniform(0, 2))
                 for _ in range(3)]
        x = [rng.uniform(-1, 1) for _ in range(n)]
        got = tensor_contract(rank_one_sum(terms, m, n), x, m)
        want = sum(t.w * sum(a * b for a, b in zip(t.u, x)) ** m for t in terms)
        assert abs(got - want) <= 1e-12 * max(1.0, sum(t.w * sum(abs(a * b) for a, b in zip(t.u, x)) ** m
                                                     for t in terms))


def test_polynomial_eval_examples():
    S = MultidimensionalSequence(2, table={(0,): 1, (1,): 2, (2,): 5}, max_degree=2)
    assert polynomial_eval(S, 2, (1, 1)) == polynomial_eval(S, 2, (1, 1), "tensor") == 10
    T = sequence_from_generating_vector(GeneratingVector([F(k, 3) + 2 for k in range(13)]), 4)
    assert polynomial_eval(T, 3, (1, 0, 0, 0)) == T[(0, 0, 0)]
    C = sequence_from_generating_vector(GeneratingVector([1] * 7), 3)
    assert polynomial_eval(C, 3, (1, 1, 1)) == polynomial_eval(C, 3, (1, 1, 1), "tensor") == 27


@given(st.integers(2, 4), st.integers(1, 5), st.data())
def test_path_equality_exact(n, m, data):
    v = GeneratingVector(data.draw(st.lists(small_fractions, min_size=m * (n - 1) + 1,
                                            max_size=m * (n - 1) + 1)))
    x = data.draw(st.lists(small_fractions, min_size=n, max_size=n))
    S = sequence_from_generating_vector(v, n)
    assert polynomial_eval(S, m, x) == polynomial_eval(S, m, x, "tensor")


@given(st.lists(small_fractions, min_size=9, max_size=13), st.integers(1, 4))
def test_commuting_triangle(vals, m):
    n = 3
    v = GeneratingVector(vals)
    if v.L < m * (n - 1):
        return
    A = moment_tensor_from_sequence(sequence_from_generating_vector(v, n), m)
    assert A == densify(hankel_tensor(v, n, m))
    assert is_hankel(A)
