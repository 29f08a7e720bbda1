import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigor import ffield
from rigor.ffield import MODULUS, DimensionError, FieldError, RowBasis

from oracles import egcd_inverse, naive_rank

Q = MODULUS


def test_modulus_is_mersenne_61():
    assert Q == 2 ** 61 - 1


def test_scalar_examples():
    assert ffield.inv(1) == 1
    assert ffield.mul(Q - 1, Q - 1) == 1
    assert ffield.neg(0) == 0
    assert ffield.add(Q - 1, 1) == 0
    assert ffield.sub(0, 1) == Q - 1


def test_inverse_of_zero_raises():
    with pytest.raises(FieldError):
        ffield.inv(0)


def test_unreduced_input_rejected():
    with pytest.raises(FieldError):
        ffield.add(Q, 0)


def test_inverse_against_extended_euclid():
    rnd = random.Random(7)
    for _ in range(1000):
        a = rnd.randrange(1, Q)
        assert ffield.inv(a) == egcd_inverse(a)
        assert ffield.mul(a, ffield.inv(a)) == 1


@given(st.integers(0, Q - 1), st.integers(0, Q - 1))
def test_vector_multiply_matches_python(a, b):
    got = ffield.mul_vec(np.array([a], np.uint64), np.array([b], np.uint64))
    assert int(got[0]) == a * b % Q


@pytest.mark.parametrize("a,b", [(Q - 1, Q - 1), (2 ** 60, 2 ** 60), (2 ** 32 - 1, 2 ** 61 - 2), (0, Q - 1)])
def test_vector_multiply_edge_values(a, b):
    got = ffield.mul_vec(np.array([a], np.uint64), np.array([b], np.uint64))
    assert int(got[0]) == a * b % Q


def test_insert_examples():
    b = RowBasis(4)
    assert b.insert([0, 0, 0, 0]) is False
    assert b.rank == 0
    assert b.insert([0, 3, 0, 1]) is True
    assert b.rank == 1
    assert b.insert([0, 3, 0, 1]) is False
    assert b.rank == 1


def test_pivots_are_normalized_and_distinct():
    b = RowBasis(5)
    for row in ([0, 2, 4, 0, 1], [0, 2, 5, 0, 0], [7, 0, 0, 0, 1]):
        b.insert(row)
    rows = b.rows
    assert len(set(b.pivots)) == b.rank == 3
    for r, p in zip(rows, b.pivots):
        assert int(r[p]) == 1
        assert not r[:p].any()


def test_reduce_examples():
    b = RowBasis(3)
    r = np.array([1, 2, 3], np.uint64)
    assert not b.reduce(np.zeros(3, np.uint64)).any()
    assert np.array_equal(b.reduce(r), r)
    b.insert(r)
    assert not b.reduce(r).any()
    assert b.rank == 1


def test_length_mismatch():
    b = RowBasis(3)
    with pytest.raises(DimensionError):
        b.insert([1, 2])
    with pytest.raises(DimensionError):
        b.reduce(np.zeros(4, np.uint64))


def test_reduce_of_explicit_combination_is_zero():
    rnd = random.Random(3)
    for _ in range(20):
        dim = 12
        rows = [[rnd.randrange(Q) for _ in range(dim)] for _ in range(5)]
        b = RowBasis(dim)
        for r in rows:
            b.insert(r)
        coeffs = [rnd.randrange(Q) for _ in rows]
        combo = [sum(c * r[j] for c, r in zip(coeffs, rows)) % Q for j in range(dim)]
        assert not b.reduce(combo).any()
        assert b.rank == 5


def _random_matrix(rnd, rows, cols):
    # low-rank and sparse matrices exercise dependent inserts
    kind = rnd.random()
    if kind < 0.3:
        base = [[rnd.randrange(Q) for _ in range(cols)] for _ in range(rnd.randint(1, max(1, min(rows, cols))))]
        return [[sum(rnd.randrange(3) * b[j] for b in base) % Q for j in range(cols)] for _ in range(rows)]
    if kind < 0.6:
        return [[rnd.choice([0, 0, 0, 1, Q - 1, rnd.randrange(Q)]) for _ in range(cols)] for _ in range(rows)]
    return [[rnd.randrange(Q) for _ in range(cols)] for _ in range(rows)]


def test_rank_matches_naive_elimination():
    rnd = random.Random(11)
    for _ in range(150):
        cols = rnd.randint(1, 30)
        rows = _random_matrix(rnd, rnd.randint(0, 30), cols)
        b = RowBasis(cols)
        for r in rows:
            b.insert(r)
        assert b.rank == naive_rank(rows) if rows else b.rank == 0
        assert b.rank <= cols


def test_insert_many_matches_single_inserts():
    rnd = random.Random(5)
    rows = _random_matrix(rnd, 25, 20)
    one = RowBasis(20)
    for r in rows:
        one.insert(r)
    many = RowBasis(20)
    many.insert_many(np.array(rows, dtype=np.uint64))
    assert many.rank == one.rank
    assert many.pivots == one.pivots


def test_insert_is_deterministic():
    rnd = random.Random(9)
    rows = _random_matrix(rnd, 15, 10)
    runs = []
    for _ in range(2):
        b = RowBasis(10)
        flags = [b.insert(r) for r in rows]
        runs.append((flags, b.pivots, b.rows.tolist()))
    assert runs[0] == runs[1]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 12), st.integers(0, 12))
def test_rank_grows_by_at_most_one_and_reduce_agrees_with_insert(seed, cols, nrows):
    rnd = random.Random(seed)
    rows = _random_matrix(rnd, nrows, cols)
    probe = _random_matrix(rnd, 1, cols)[0]
    b = RowBasis(cols)
    for r in rows:
        before = b.rank
        flag = b.insert(r)
        assert b.rank - before == (1 if flag else 0)
    in_span = not b.reduce(probe).any()
    assert in_span == (not b.copy().insert(probe))
    assert b.contains(probe) == in_span


def test_kernel_annihilates_rows_and_has_right_size():
    rnd = random.Random(2)
    rows = _random_matrix(rnd, 7, 12)
    b = RowBasis(12)
    for r in rows:
        b.insert(r)
    k = b.kernel()
    assert k.shape == (12, 12 - b.rank)
    for r in rows:
        assert not ffield.vecmat(np.array(r, np.uint64), k).any()
    assert naive_rank(k.T.tolist()) == 12 - b.rank
