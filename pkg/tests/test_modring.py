import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from arithlat.errors import DomainError, SizeError
from arithlat.modring import (
    ModElement,
    ModMatrix,
    all_squares,
    is_square,
    mat_vec_mod,
    no_power_hits_minus_one,
    power_orbit,
    reduce,
    smith_diagonalize,
    solve_linear_mod,
    square_roots,
)
from arithlat.qfield import U0, FieldElement


def brute_squares(m):
    out = set()
    for c in itertools.product(range(m), repeat=4):
        e = ModElement(c, m)
        out.add(e * e)
    return out


def test_ring_has_256_elements_mod_4():
    assert len(list(itertools.product(range(4), repeat=4))) == 256


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_squares_match_brute_force(m):
    assert all_squares(m) == frozenset(brute_squares(m))


def test_named_nonsquares_mod_4():
    for f in (FieldElement(-1), FieldElement(2, 0, 1), FieldElement(-2, 0, -1)):
        assert not is_square(reduce(f, 4))
    assert is_square(reduce(FieldElement(1, 1) * FieldElement(1, 1), 4))
    assert not is_square(reduce(U0, 4))


def test_everything_named_is_a_square_mod_2():
    for f in (FieldElement(-1), FieldElement(2, 0, 1), FieldElement(-2, 0, -1)):
        assert is_square(reduce(f, 2))


def test_square_roots_square_back():
    target = reduce(FieldElement(1, 2, 0, 1) ** 2, 4)
    roots = square_roots(target)
    assert roots and all(r * r == target for r in roots)


def test_square_guard():
    with pytest.raises(SizeError):
        all_squares(65)


def test_u0_mod_4():
    u = reduce(U0, 4)
    assert u.coeffs == (3, 2, 2, 2)
    assert u * u == ModElement.one(4)
    assert u != ModElement((-1, 0, 0, 0), 4)
    assert no_power_hits_minus_one(U0, 4)
    assert not no_power_hits_minus_one(FieldElement(-1), 4)


def test_power_orbit_rejects_non_units():
    with pytest.raises(DomainError):
        power_orbit(ModElement((2, 0, 0, 0), 4))


def test_reduce_requires_integral():
    with pytest.raises(DomainError):
        reduce(FieldElement("1/2"), 4)


coeffs = st.tuples(*[st.integers(-50, 50)] * 4)


@given(coeffs, coeffs, st.sampled_from([2, 3, 4, 8, 9]))
def test_reduction_is_a_ring_map(a, b, m):
    fa, fb = FieldElement(*a), FieldElement(*b)
    assert reduce(fa * fb, m) == reduce(fa, m) * reduce(fb, m)
    assert reduce(fa + fb, m) == reduce(fa, m) + reduce(fb, m)


@given(coeffs, st.sampled_from([3, 5, 9]))
def test_inverse_when_unit(a, m):
    e = ModElement(a, m)
    if e.is_unit:
        assert e * e.inverse() == ModElement.one(m)


def test_matrix_det_is_multiplicative():
    rng = random.Random(1)
    m = 4
    for _ in range(20):
        A = ModMatrix([[ModElement([rng.randrange(m) for _ in range(4)], m) for _ in range(3)] for _ in range(3)])
        B = ModMatrix([[ModElement([rng.randrange(m) for _ in range(4)], m) for _ in range(3)] for _ in range(3)])
        assert (A @ B).det() == A.det() * B.det()


def brute_kernel(A, m):
    cols = len(A[0])
    return {v for v in itertools.product(range(m), repeat=cols) if not any(mat_vec_mod(A, v, m))}


def test_kernel_examples():
    k = solve_linear_mod([[2, 0], [0, 2]], 4)
    assert sorted(k.orders) == [2, 2]
    assert set(k.elements()) == {(0, 0), (2, 0), (0, 2), (2, 2)}
    assert solve_linear_mod([[1, 0], [0, 1]], 4).is_trivial


@pytest.mark.parametrize("seed", range(60))
def test_kernel_matches_brute_force(seed):
    rng = random.Random(seed)
    m = rng.choice([2, 3, 4, 6, 8, 9])
    rows, cols = rng.randint(1, 4), rng.randint(1, 3)
    A = [[rng.randrange(m) for _ in range(cols)] for _ in range(rows)]
    k = solve_linear_mod(A, m)
    expected = brute_kernel(A, m)
    assert k.size == len(expected)
    assert set(k.elements()) == expected
    for v in itertools.product(range(m), repeat=cols):
        assert k.contains(v) == (v in expected)


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6), st.sampled_from([4, 8, 12]))
def test_smith_basis_change_is_invertible(seed, m):
    rng = random.Random(seed)
    A = [[rng.randrange(m) for _ in range(3)] for _ in range(3)]
    _, V, Vinv = smith_diagonalize(A, m)
    prod = [[sum(V[i][k] * Vinv[k][j] for k in range(3)) % m for j in range(3)] for i in range(3)]
    assert prod == [[1 if i == j else 0 for j in range(3)] for i in range(3)]
