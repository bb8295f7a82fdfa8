import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from arithlat.errors import ParseError, ShapeError, SingularError
from arithlat.linalg import FieldMatrix, adjugate, det, inverse, kernel, rank, solve
from arithlat.qfield import PLUS, SQRT2, U0, FieldElement

fractions = st.fractions(min_value=-4, max_value=4, max_denominator=3)
elements = st.builds(FieldElement, fractions, fractions, fractions, fractions)


def square(n):
    return st.lists(st.lists(elements, min_size=n, max_size=n), min_size=n, max_size=n).map(FieldMatrix)


def numeric(M):
    return mpmath.matrix([[PLUS.value(x) for x in row] for row in M.rows])


def test_spec_determinants():
    assert det(FieldMatrix.diag([U0, U0.inverse(), 1])) == FieldElement(1)
    assert det(FieldMatrix.diag([-1, SQRT2, SQRT2])) == FieldElement(-2)


def test_diagonal_inverse():
    M = FieldMatrix.diag([U0, 1, U0.inverse()])
    assert inverse(M) == FieldMatrix.diag([U0.inverse(), 1, U0])


def test_singular_inverse():
    with pytest.raises(SingularError):
        inverse(FieldMatrix([[1, 2], [2, 4]]))


def test_kernel_examples():
    assert kernel(FieldMatrix.identity(3)) == []
    assert len(kernel(FieldMatrix.zeros(2))) == 2
    (v,) = kernel(FieldMatrix([[1, SQRT2]]))
    assert v == FieldMatrix.column([-SQRT2, 1])


def test_shape_errors():
    with pytest.raises(ShapeError):
        det(FieldMatrix([[1, 2, 3]]))
    with pytest.raises(ShapeError):
        FieldMatrix.identity(2) @ FieldMatrix.identity(3)
    with pytest.raises(ShapeError):
        FieldMatrix([[1, 2], [3]])


@settings(max_examples=25, deadline=None)
@given(square(3), square(3))
def test_det_is_multiplicative(A, B):
    assert det(A @ B) == det(A) * det(B)


@settings(max_examples=25, deadline=None)
@given(square(3))
def test_det_matches_numeric_oracle(A):
    with mpmath.workdps(50):
        assert abs(PLUS.value(det(A)) - mpmath.det(numeric(A))) < mpmath.mpf(10) ** -30


@settings(max_examples=25, deadline=None)
@given(square(3))
def test_inverse_and_adjugate(A):
    d = det(A)
    assert A @ adjugate(A) == FieldMatrix.identity(3) * d
    if d:
        assert inverse(A) @ A == FieldMatrix.identity(3)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(elements, min_size=4, max_size=4), min_size=2, max_size=3))
def test_rank_nullity(rows):
    A = FieldMatrix(rows)
    basis = kernel(A)
    assert rank(A) + len(basis) == A.n_cols
    for v in basis:
        assert all(not x for x in (A @ v).flatten())


def test_solve():
    A = FieldMatrix([[2, 1], [1, 3]])
    b = FieldMatrix.column([1, SQRT2])
    assert A @ solve(A, b) == b


def test_json_round_trip():
    M = FieldMatrix([[U0, FieldElement("1/3", 0, 0, 2)], [0, -1]])
    assert FieldMatrix.from_json(M.to_json()) == M
    assert FieldMatrix.from_dict({"entries": [["5", [1, 0, 0, "1/2"]]]}) == FieldMatrix([[5, FieldElement(1, 0, 0, Fraction(1, 2))]])


@pytest.mark.parametrize("text", ['{"entries": []}', "not json", '{"n": 3, "entries": [["1"]]}', '{"entries": [["1 2"]]}'])
def test_json_errors(text):
    with pytest.raises(ParseError):
        FieldMatrix.from_json(text)


def test_power_and_tau():
    M = FieldMatrix([[U0, 0], [0, U0.inverse()]])
    assert M ** -2 @ M ** 2 == FieldMatrix.identity(2)
    assert M.tau() == FieldMatrix([[U0.inverse(), 0], [0, U0]])


def test_random_block_diag():
    rng = random.Random(3)
    A = FieldMatrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(2)])
    B = FieldMatrix([[7]])
    M = FieldMatrix.block_diag(A, B)
    assert det(M) == det(A) * 7
