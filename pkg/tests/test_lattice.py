import math
import random

import mpmath
import pytest

from arithlat.errors import DomainError, PrecisionError, ShapeError, SizeError
from arithlat.lattice import (
    LatticeElement,
    LatticeSpec,
    a_generator,
    b_generator,
    enumerate_members,
    identity,
    in_congruence_kernel,
    is_member,
    reduce_matrix,
    symmetric_space_distance,
)
from arithlat.linalg import FieldMatrix
from arithlat.modring import ModMatrix
from arithlat.qfield import PLUS, U0, FieldElement, galois_tau

S3, S4 = LatticeSpec(3), LatticeSpec(4)


def shear(n):
    return FieldMatrix([[1 if i == j or (i, j) == (0, 1) else 0 for j in range(n)] for i in range(n)])


def generators(spec):
    n = spec.n
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                k = [0] * n
                k[i], k[j] = 1, -1
                gens.append(a_generator(spec, k))
    small = LatticeSpec(n - 1)
    gens.append(b_generator(spec, FieldMatrix.identity(n - 1), 1))
    gens.append(b_generator(spec, a_generator(small, [1, -1] + [0] * (n - 3)), -1))
    return gens


def random_word(gens, rng, max_len=4):
    w = identity(gens[0].spec)
    for _ in range(rng.randint(0, max_len)):
        g = rng.choice(gens)
        w = w @ (g if rng.random() < 0.5 else g.inverse())
    return w


def test_spec_form():
    assert S3.D == FieldMatrix.diag([-1, FieldElement(0, 0, 1), FieldElement(0, 0, 1)])
    with pytest.raises(DomainError):
        LatticeSpec(1)


def test_membership_examples():
    assert is_member(FieldMatrix.identity(3), S3)
    assert is_member(FieldMatrix.diag([U0, U0.inverse(), 1]), S3)
    assert not is_member(shear(3), S3)
    residue = shear(3).tau().T @ S3.D @ shear(3) - S3.D
    assert residue == FieldMatrix([[0, -1, 0], [-1, -1, 0], [0, 0, 0]])


def test_membership_requires_det_one_and_integrality():
    assert not is_member(FieldMatrix.diag([-1, 1, 1]), S3)  # relation holds, det = -1
    assert not is_member(FieldMatrix.diag([U0 ** 2 / 2, 1, 1]), S3)
    with pytest.raises(ShapeError):
        is_member(FieldMatrix.identity(2), S3)


def test_a_generator():
    assert a_generator(S3, [0, 0, 0]).g == FieldMatrix.identity(3)
    assert is_member(a_generator(S3, [2, -1, -1]).g, S3)
    with pytest.raises(DomainError):
        a_generator(S3, [1, 0, 0])


def test_a_generator_is_a_homomorphism():
    rng = random.Random(0)
    for _ in range(10):
        k1 = [rng.randint(-2, 2) for _ in range(2)]
        k2 = [rng.randint(-2, 2) for _ in range(2)]
        x = a_generator(S3, k1 + [-sum(k1)])
        y = a_generator(S3, k2 + [-sum(k2)])
        s = [a + b for a, b in zip(k1 + [-sum(k1)], k2 + [-sum(k2)])]
        assert x @ y == a_generator(S3, s)
        assert x @ y == y @ x


def test_b_generator_examples():
    assert b_generator(S3, FieldMatrix.identity(2), 0).g == FieldMatrix.identity(3)
    b = b_generator(S3, FieldMatrix.identity(2), 1)
    assert b.g == FieldMatrix.diag([U0.inverse(), U0.inverse(), U0 ** 2])
    h = FieldMatrix.diag([U0, U0.inverse()])
    assert is_member(b_generator(S3, h, 1).g, S3)
    with pytest.raises(DomainError):
        b_generator(S3, shear(2), 1)


def test_closure_under_products_and_inverses():
    rng = random.Random(7)
    for spec in (S3, S4):
        gens = generators(spec)
        for _ in range(20):
            w = random_word(gens, rng)
            assert is_member(w.g, spec)
            assert (w @ w.inverse()).g == FieldMatrix.identity(spec.n)


def test_reduce_examples():
    assert reduce_matrix(identity(S3), 4) == ModMatrix.identity(3, 4)
    img = reduce_matrix(a_generator(S3, [1, -1, 0]), 4)
    assert img[0, 0].coeffs == (3, 2, 2, 2)
    assert img[1, 1].coeffs == tuple(int(c) % 4 for c in galois_tau(U0).coords)
    assert img[2, 2].coeffs == (1, 0, 0, 0)
    assert not in_congruence_kernel(a_generator(S3, [1, -1, 0]), 4)
    assert in_congruence_kernel(identity(S3), 4)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_reduction_is_a_homomorphism(m):
    rng = random.Random(m)
    gens = generators(S3)
    for _ in range(10):
        g, h = random_word(gens, rng, 3), random_word(gens, rng, 3)
        assert reduce_matrix(g @ h, m) == reduce_matrix(g, m) @ reduce_matrix(h, m)
        assert reduce_matrix(g, m).det().coeffs == (1, 0, 0, 0)


def test_congruence_kernel_detects_equal_images():
    g = a_generator(S3, [1, -1, 0])
    h = g @ a_generator(S3, [2, -2, 0])  # u0^2 = 1 mod 4, so h = g mod 4
    assert in_congruence_kernel(g @ h.inverse(), 4)


def test_distance_examples():
    assert symmetric_space_distance(identity(S3)) == 0
    with mpmath.workdps(80):
        e = mpmath.e
        d = symmetric_space_distance([[e, 0, 0], [0, 1 / e, 0], [0, 0, 1]])
        assert abs(d - mpmath.sqrt(2)) < mpmath.mpf(10) ** -50
    g = a_generator(S3, [1, -1, 0])
    expected = math.sqrt(2) * math.log(PLUS(U0))
    assert abs(float(symmetric_space_distance(g)) - expected) < 1e-12
    assert abs(math.log(PLUS(U0)) - 2.4485) < 1e-4


def test_distance_inverse_symmetry():
    rng = random.Random(11)
    gens = generators(S3)
    for _ in range(10):
        w = random_word(gens, rng, 3)
        assert abs(symmetric_space_distance(w) - symmetric_space_distance(w.inverse())) < 1e-30


def test_distance_precision_error():
    with pytest.raises(PrecisionError):
        symmetric_space_distance(FieldMatrix([[1, 0], [0, 0]]))


def test_enumeration_near_identity_is_the_finite_stabiliser():
    res = enumerate_members(S3, 1, 0.5)
    assert not res.budget_exhausted
    assert identity(S3) in res
    for m in res:
        assert is_member(m.g, S3)
        assert symmetric_space_distance(m) < 1e-20
    # signed permutations fixing the first coordinate
    assert len(res) == 8


def test_enumeration_finds_the_diagonal_unit():
    # the distance of diag(u0, u0^-1) is sqrt2 log u0 ~ 3.46
    assert FieldMatrix.diag([U0, U0.inverse()]) not in enumerate_members(LatticeSpec(2), 3, 3.4)
    res = enumerate_members(LatticeSpec(2), 3, 3.5)
    g = FieldMatrix.diag([U0, U0.inverse()])
    assert g in res and FieldMatrix.diag([U0.inverse(), U0]) in res
    for m in res:
        assert m.inverse() in res or not all(abs(c) <= 3 for x in m.inverse().g.flatten() for c in x.coords)


def test_enumeration_n3_contains_explicit_member():
    res = enumerate_members(S3, 3, 3.5)
    g = a_generator(S3, [1, -1, 0])
    assert g in res and g.inverse() in res


def test_enumeration_budget():
    res = enumerate_members(S3, 2, 3.0, node_budget=50)
    assert res.budget_exhausted and res.nodes > 50
    with pytest.raises(SizeError):
        enumerate_members(S3, 2, 3.0, node_budget=50, strict=True)
    with pytest.raises(SizeError):
        enumerate_members(S3, 20, 3.0)


def test_json_round_trip():
    g = a_generator(S3, [1, -1, 0])
    d = g.to_dict()
    assert d["certified"] is True
    assert LatticeElement.from_dict(d) == g
    with pytest.raises(DomainError):
        LatticeElement.from_dict(shear(3).to_dict())
