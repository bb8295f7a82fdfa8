from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from arithlat.errors import DomainError, ParseError, SingularError, VerificationFailed
from arithlat.qfield import (
    MINUS,
    ONE,
    PLUS,
    SQRT2,
    U0,
    X,
    ZERO,
    Embedding,
    FieldElement,
    complex_value,
    field_norm,
    galois_sigma,
    galois_tau,
    in_u0,
    is_mth_power,
    is_unit,
    unit_decompose,
    verify_fundamental_unit,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=7)
elements = st.builds(FieldElement, fractions, fractions, fractions, fractions)
nonzero = elements.filter(bool)
small_ints = st.integers(-6, 6)
integral = st.builds(FieldElement, small_ints, small_ints, small_ints, small_ints)

x = sympy.Symbol("x")


def as_poly(f):
    return sum(sympy.Rational(c.numerator, c.denominator) * x ** i for i, c in enumerate(f.coords))


def test_parse_and_text_round_trip():
    f = FieldElement.parse("1/2 -3 0 7/5")
    assert f.coords == (Fraction(1, 2), Fraction(-3), Fraction(0), Fraction(7, 5))
    assert FieldElement.parse(f.to_text()) == f


@pytest.mark.parametrize("bad", ["1 2 3", "a b c d", "1 2 3 4 5", ""])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ParseError):
        FieldElement.parse(bad)


def test_reduction_rule():
    assert X ** 4 == FieldElement(2)
    assert X * X == SQRT2
    assert SQRT2 * SQRT2 == FieldElement(2)


def test_zero_has_no_inverse():
    with pytest.raises(SingularError):
        ZERO.inverse()


@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(nonzero)
def test_inverse(a):
    assert a * a.inverse() == ONE
    assert a / a == ONE


@given(elements, elements)
def test_tau_is_a_field_automorphism(a, b):
    assert galois_tau(a * b) == galois_tau(a) * galois_tau(b)
    assert galois_tau(a + b) == galois_tau(a) + galois_tau(b)
    assert galois_tau(galois_tau(a)) == a


@given(elements)
def test_norm_matches_resultant(a):
    # independent oracle: Res(x^4 - 2, f) is the norm of f(2^(1/4))
    expected = sympy.resultant(x ** 4 - 2, as_poly(a), x)
    assert field_norm(a) == Fraction(int(sympy.numer(expected)), int(sympy.denom(expected)))


@given(elements, elements)
def test_norm_is_multiplicative(a, b):
    assert field_norm(a * b) == field_norm(a) * field_norm(b)


def test_sigma_on_subfield_only():
    assert galois_sigma(FieldElement(1, 0, 1)) == FieldElement(1, 0, -1)
    with pytest.raises(DomainError):
        galois_sigma(X)


def test_u0_identity_and_value():
    assert galois_tau(U0) * U0 == ONE
    assert U0.is_integral and is_unit(U0) and in_u0(U0)
    assert abs(PLUS(U0) - 11.5704) < 1e-3


@given(elements)
def test_embedding_values_agree_with_direct_evaluation(a):
    with mpmath.workdps(80):
        r = mpmath.root(2, 4)
        for emb, pt in ((PLUS, r), (MINUS, -r)):
            direct = sum(mpmath.mpf(c.numerator) / c.denominator * pt ** i for i, c in enumerate(a.coords))
            assert abs(emb.value(a) - direct) < mpmath.mpf(10) ** -40
            if abs(direct) > 1e-30:
                assert emb.sign(a) == (1 if direct > 0 else -1)
    assert abs(complex_value(a) - as_poly(a).subs(x, sympy.I * sympy.root(2, 4)).evalf(50)) < 1e-30


def test_sign_is_exact_on_tiny_values():
    # u0^-8 is about 3e-9 and still positive
    tiny = U0 ** -8
    assert PLUS.sign(tiny) == 1
    assert PLUS.sign(-tiny) == -1
    assert PLUS.sign(ZERO) == 0


def test_interval_contains_value():
    lo, hi = Embedding("PLUS", 30).interval(U0)._mpi_
    v = PLUS.value(U0)
    assert mpmath.mp.make_mpf(lo) <= v <= mpmath.mp.make_mpf(hi)


def test_bad_embedding_tag():
    with pytest.raises(DomainError):
        Embedding("COMPLEX")


def test_verify_fundamental_unit_passes():
    report = verify_fundamental_unit()
    assert report.ok
    assert abs(report.witness["least_candidate_value"] - 5.285) < 1e-3
    assert abs(report.witness["generator_value"] - 11.5704) < 1e-3
    assert report.witness["least_candidate_value"] > report.witness["sqrt_generator_value"]


def test_verify_rejects_a_square_of_the_generator():
    with pytest.raises(VerificationFailed) as info:
        verify_fundamental_unit(U0 * U0)
    assert U0.to_text() in info.value.witness["counterexamples"]


def test_verify_rejects_non_unit():
    with pytest.raises(VerificationFailed):
        verify_fundamental_unit(FieldElement(3, 2, 2, 1))


@pytest.mark.parametrize("sign,k", [(1, 0), (1, 3), (-1, -1), (1, -4), (-1, 5)])
def test_unit_decompose(sign, k):
    assert unit_decompose(sign * U0 ** k) == (sign, k)


def test_unit_decompose_rejects_non_units():
    with pytest.raises(DomainError):
        unit_decompose(FieldElement(2))


def test_is_mth_power_examples():
    assert is_mth_power(U0 ** 6, 3) == U0 ** 2
    assert is_mth_power(U0, 2) is None
    assert is_mth_power(ONE, 5) == ONE
    assert is_mth_power(FieldElement(2), 4) in (X, -X)


@settings(max_examples=40, deadline=None)
@given(nonzero, st.integers(2, 5))
def test_is_mth_power_recovers_roots(a, m):
    root = is_mth_power(a ** m, m)
    assert root is not None and root ** m == a ** m


@settings(max_examples=40, deadline=None)
@given(integral.filter(bool))
def test_is_mth_power_never_lies(a):
    root = is_mth_power(a, 3)
    if root is not None:
        assert root ** 3 == a
