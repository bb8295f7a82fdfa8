import itertools
import random
from fractions import Fraction

import pytest

from arithlat.errors import DomainError, SizeError, VerificationFailed
from arithlat.intersection import K0, u_sing
from arithlat.liealg import (
    LieVector,
    WedgeVector,
    ad,
    ad_on_p,
    ad_relations,
    cartan_pieces,
    cayley,
    check_normal_coefficient,
    conjugated_singular_vector,
    h_vec,
    invariant_dimension_numeric,
    invariant_forms,
    krylov_closure,
    normal_coefficient_vanishes,
    normal_index,
    p_elem,
    random_rotation,
    transversality_check,
    u_rot,
    v0_action,
    wedge_ad,
    wedge_basis,
)
from arithlat.linalg import FieldMatrix


def test_lie_vectors_are_traceless():
    with pytest.raises(DomainError):
        LieVector([[1, 0], [0, 0]])


def test_ad_examples():
    assert ad(u_rot(3), p_elem(3, 2, 3)) == p_elem(3, 1, 2)
    img = ad(u_rot(3), p_elem(3, 1, 3))
    assert img == h_vec(3) * img.m[0][0] and img.m[0][0] != 0
    X = p_elem(4, 1, 2)
    assert ad(X, X) == LieVector.zero(4)


@pytest.mark.parametrize("n", [3, 4])
def test_jacobi_identity(n):
    pieces = cartan_pieces(n)
    basis = pieces.k_basis + pieces.p_basis
    rng = random.Random(n)
    for _ in range(40):
        x, y, z = (rng.choice(basis) for _ in range(3))
        total = ad(x, ad(y, z)) + ad(y, ad(z, x)) + ad(z, ad(x, y))
        assert total == LieVector.zero(n)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_cartan_brackets(n):
    pieces = cartan_pieces(n)
    assert pieces.dim_k + pieces.dim_p == n * n - 1
    for X in pieces.k_basis:
        for Y in pieces.p_basis:
            assert ad(X, Y).is_symmetric()
    for Y, Z in itertools.combinations(pieces.p_basis, 2):
        assert ad(Y, Z).is_antisymmetric()


@pytest.mark.parametrize("n", [3, 4])
def test_p_basis_is_orthogonal(n):
    pieces = cartan_pieces(n)
    for i, b in enumerate(pieces.p_basis):
        c = pieces.coords(b)
        assert c == [Fraction(int(i == j)) for j in range(pieces.dim_p)]
    Y = pieces.from_coords(list(range(1, pieces.dim_p + 1)))
    assert pieces.coords(Y) == [Fraction(j) for j in range(1, pieces.dim_p + 1)]


def test_ad_on_p_rejects_non_compact_direction():
    with pytest.raises(DomainError):
        ad_on_p(p_elem(3, 1, 2))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_wedge_ad_trace_and_zero(k):
    pieces = cartan_pieces(3)
    for X in pieces.k_basis:
        assert wedge_ad(X, k).trace() == 0
    assert wedge_ad(LieVector.zero(3), k).is_zero()


def test_wedge_ad_is_a_derivation():
    # on a decomposable wedge the image is the sum over slots
    pieces = cartan_pieces(3)
    X = u_rot(3)
    A = ad_on_p(X)
    op = wedge_ad(X, 2)
    for i, j in wedge_basis(pieces.dim_p, 2):
        expected = WedgeVector(2)
        for r in range(pieces.dim_p):
            expected.add((r, j), A[r][i])
            expected.add((i, r), A[r][j])
        assert op.apply(WedgeVector(2, {(i, j): 1})) == expected


def test_wedge_vector_antisymmetry():
    v = WedgeVector(2, {(1, 0): 3})
    assert v[(0, 1)] == -3 and v[(1, 0)] == 3
    v.add((1, 1), 5)
    assert v.coeffs == {(0, 1): -3}


@pytest.mark.parametrize("n,k,dim", [(3, 2, 0), (4, 3, 0), (3, 0, 1), (4, 0, 1), (3, 5, 1)])
def test_invariant_form_dimensions(n, k, dim):
    forms = invariant_forms(n, k)
    assert len(forms) == dim
    # independent re-check: every form is killed by each generator of k
    pieces = cartan_pieces(n)
    for f in forms:
        if k:
            for X in pieces.k_basis:
                assert not wedge_ad(X, k, pieces).apply(f)


def test_invariant_forms_guard():
    with pytest.raises(SizeError):
        invariant_forms(9, 8)


@pytest.mark.parametrize("n,k", [(3, 2), (3, 1), (3, 5)])
def test_invariant_dimension_agrees_with_averaging(n, k):
    exact = len(invariant_forms(n, k))
    assert abs(invariant_dimension_numeric(n, k, samples=3000, seed=1) - exact) < 0.3


@pytest.mark.parametrize("n", [3, 4, 5])
def test_ad_relations(n):
    r = ad_relations(n)
    assert r["ok"]
    assert (r["a"], r["b"]) == (2, -2)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_v0_under_the_derivation(n):
    # the derivation moves both V0 vectors out of V0 and has zero projection onto it
    res = v0_action(n)
    assert not res["invariant"]
    assert res["matrix"] == [[0, 0], [0, 0]]


@pytest.mark.parametrize("n,pattern", [(3, [[0, 2], [2, 0]]), (4, [[0, 2], [-2, 0]]), (5, [[0, 2], [2, 0]])])
def test_v0_under_the_exterior_power(n, pattern):
    res = v0_action(n, exterior=True)
    assert res["invariant"]
    assert res["matrix"] == pattern


def test_krylov_closure():
    assert krylov_closure(3) == {"dim": 4, "nonsingular": True, "rank": 4}
    res = krylov_closure(4)
    assert res["dim"] == 6 and not res["nonsingular"]


@pytest.mark.parametrize("n", [3, 4])
def test_normal_coefficient_vanishes(n):
    rep = normal_coefficient_vanishes(n)
    assert rep.ok
    assert rep.params["invariant_dim"] == 0


def test_normal_coefficient_negative_control():
    bad = WedgeVector(2, {normal_index(3): 1})
    assert wedge_ad(u_rot(3), 2).apply(bad)  # not invariant
    with pytest.raises(VerificationFailed):
        check_normal_coefficient([bad], 3)
    check_normal_coefficient([WedgeVector(2, {(0, 1): 1})], 3)


def test_conjugated_singular_vector_examples():
    assert conjugated_singular_vector(FieldMatrix.identity(3)) == u_sing(3)
    third = Fraction(1, 3)
    expected = FieldMatrix([[2, 2, -2], [2, -1, 4], [-2, 4, -1]]) * FieldMatrix([[third]])[0, 0]
    res = conjugated_singular_vector(K0)
    assert res == expected
    assert all(res[i, j] for i in range(3) for j in range(3) if i != j)


def test_conjugated_singular_vector_zero_in_last_column():
    k = FieldMatrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    res = conjugated_singular_vector(k)
    assert any(not res[i, j] for i in range(3) for j in range(3) if i != j)
    assert not transversality_check(k)


def test_conjugated_singular_vector_rejects_non_orthogonal():
    with pytest.raises(DomainError):
        conjugated_singular_vector(FieldMatrix.diag([2, 1, 1]))


@pytest.mark.parametrize("n", [3, 4])
def test_closed_form_on_random_rotations(n):
    rng = random.Random(100 + n)
    for _ in range(50):
        k = random_rotation(n, rng)
        assert k.T @ k == FieldMatrix.identity(n)
        conjugated_singular_vector(k)  # raises on disagreement


def test_transversality_examples():
    assert not transversality_check(FieldMatrix.identity(3))
    assert transversality_check(K0)


@pytest.mark.parametrize("n", [3, 4])
def test_transversality_when_last_column_has_no_zero(n):
    rng = random.Random(n)
    seen = 0
    for _ in range(40):
        k = random_rotation(n, rng)
        if all(k[i, n - 1] for i in range(n)):
            seen += 1
            assert transversality_check(k)
    assert seen > 10


def test_cayley_rejects_symmetric():
    with pytest.raises(DomainError):
        cayley([[0, 1], [1, 0]])
