"""Exact arithmetic in L = Q[x]/(x^4 - 2), x = 2^(1/4), and its ring of integers Z[x].

Elements are stored as four rationals over the power basis 1, x, x^2, x^3.
The ring of integers of L is Z[2^(1/4)], so integrality is coordinate
integrality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce as _fold
from numbers import Rational
from typing import Iterable, Optional

import mpmath
from mpmath import iv

from .errors import DomainError, InternalError, ParseError, SingularError, VerificationFailed
from .report import PASS, Report, stopwatch

DEFAULT_DIGITS = 64


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot coerce {type(value).__name__} to an exact rational")


def _mul_coeffs(a, b):
    """Product of two coefficient 4-tuples modulo x^4 = 2.

    Works for any coefficient type supporting + and * (Fractions, ints,
    numpy integer arrays).
    """
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 + 2 * (a1 * b3 + a2 * b2 + a3 * b1),
        a0 * b1 + a1 * b0 + 2 * (a2 * b3 + a3 * b2),
        a0 * b2 + a1 * b1 + a2 * b0 + 2 * (a3 * b3),
        a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0,
    )


class FieldElement:
    """An element c0 + c1*x + c2*x^2 + c3*x^3 of Q[2^(1/4)].

    Instances are immutable and hashable; equality is coordinate-wise.
    Plain ints and Fractions are coerced in arithmetic.
    """

    __slots__ = ("_c",)

    def __init__(self, c0=0, c1=0, c2=0, c3=0):
        object.__setattr__(self, "_c", (_frac(c0), _frac(c1), _frac(c2), _frac(c3)))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @classmethod
    def _raw(cls, coords) -> "FieldElement":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_c", tuple(coords))
        return obj

    @classmethod
    def coerce(cls, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(value)

    @classmethod
    def parse(cls, text: str) -> "FieldElement":
        """Parse the whitespace-separated format ``"p0/q0 p1/q1 p2/q2 p3/q3"``."""
        parts = text.split()
        if len(parts) != 4:
            raise ParseError(f"expected four rationals, got {len(parts)} in {text!r}")
        return cls(*(_frac(p) for p in parts))

    def to_text(self) -> str:
        return " ".join(str(c) for c in self._c)

    @property
    def coords(self) -> tuple:
        return self._c

    c0 = property(lambda self: self._c[0])
    c1 = property(lambda self: self._c[1])
    c2 = property(lambda self: self._c[2])
    c3 = property(lambda self: self._c[3])

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._c)

    @property
    def is_rational(self) -> bool:
        return self._c[1] == 0 and self._c[2] == 0 and self._c[3] == 0

    @property
    def denominator(self) -> int:
        return _fold(math.lcm, (c.denominator for c in self._c), 1)

    @property
    def height(self) -> int:
        """Largest absolute numerator or denominator among the coordinates."""
        return max(max(abs(c.numerator), c.denominator) for c in self._c)

    def __repr__(self) -> str:
        args = ", ".join(str(c) if c.denominator == 1 else repr(str(c)) for c in self._c)
        return f"FieldElement({args})"

    def __str__(self) -> str:
        return self.to_text()

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self._c == other._c
        if isinstance(other, (int, Rational)):
            return self._c == (Fraction(other), 0, 0, 0)
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self._c[0])
        return hash(self._c)

    def __bool__(self) -> bool:
        return any(self._c)

    def __add__(self, other):
        if not isinstance(other, FieldElement):
            if not isinstance(other, (int, Rational)):
                return NotImplemented
            c = self._c
            return FieldElement._raw((c[0] + other, c[1], c[2], c[3]))
        return FieldElement._raw(tuple(a + b for a, b in zip(self._c, other._c)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._raw(tuple(-a for a in self._c))

    def __sub__(self, other):
        if not isinstance(other, (FieldElement, int, Rational)):
            return NotImplemented
        return self + (-FieldElement.coerce(other))

    def __rsub__(self, other):
        return FieldElement.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            return FieldElement._raw(_mul_coeffs(self._c, other._c))
        if isinstance(other, (int, Rational)):
            return FieldElement._raw(tuple(a * other for a in self._c))
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Exact inverse via the tower L / Q(sqrt 2) / Q."""
        if not self:
            raise SingularError("inverse of zero in L")
        t = galois_tau(self)
        g = self * t  # lies in Q(sqrt 2)
        n = g * galois_sigma(g)  # rational
        return t * galois_sigma(g) * (1 / n.c0)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise SingularError("division by zero in L")
            return FieldElement._raw(tuple(a / other for a in self._c))
        if isinstance(other, FieldElement):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return FieldElement.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = ONE
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self on the power basis (columns = images)."""
        cols = [(self * b)._c for b in POWER_BASIS]
        return [[cols[j][i] for j in range(4)] for i in range(4)]


ZERO = FieldElement()
ONE = FieldElement(1)
X = FieldElement(0, 1)
SQRT2 = FieldElement(0, 0, 1)
POWER_BASIS = (ONE, X, X * X, X * X * X)
#: The generator (3 + 2 sqrt2) + (2 + 2 sqrt2) * 2^(1/4) of the unit group U_0.
U0 = FieldElement(3, 2, 2, 2)


def as_element(value) -> FieldElement:
    return FieldElement.coerce(value)


def is_integral(f: FieldElement) -> bool:
    return f.is_integral


def galois_tau(f: FieldElement) -> FieldElement:
    """The automorphism x -> -x of L."""
    c = f.coords
    return FieldElement._raw((c[0], -c[1], c[2], -c[3]))


def galois_sigma(f: FieldElement) -> FieldElement:
    """sqrt2 -> -sqrt2, defined on the subfield Q(sqrt 2) only."""
    c = f.coords
    if c[1] or c[3]:
        raise DomainError(f"sigma is only defined on Q(sqrt 2); got {f.to_text()}")
    return FieldElement._raw((c[0], c[1], -c[2], c[3]))


def field_norm(f: FieldElement) -> Fraction:
    """Product of the four Galois conjugates of f, computed exactly."""
    g = f * galois_tau(f)
    return (g * galois_sigma(g)).c0


def is_unit(r: FieldElement) -> bool:
    """True iff r lies in Z[x] and has norm +-1."""
    return r.is_integral and abs(field_norm(r)) == 1


def in_u0(r: FieldElement) -> bool:
    """Membership in U_0 = {units u : tau(u) u = 1}."""
    return r.is_integral and galois_tau(r) * r == ONE


# ---------------------------------------------------------------------------
# Real embeddings
# ---------------------------------------------------------------------------


def _sign_qsqrt2(a: Fraction, b: Fraction) -> int:
    """Exact sign of a + b*sqrt(2) for rationals a, b."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    return sa if a * a > 2 * b * b else sb


def _split(f: FieldElement):
    # f = A + B*x with A, B in Q(sqrt 2)
    c = f.coords
    return FieldElement(c[0], 0, c[2]), FieldElement(c[1], 0, c[3])


def _sign_q2(g: FieldElement) -> int:
    return _sign_qsqrt2(g.c0, g.c2)


@dataclass(frozen=True)
class Embedding:
    """A real embedding L -> R, x -> +2^(1/4) (PLUS) or -2^(1/4) (MINUS).

    Signs and comparisons are decided exactly. ``interval`` returns a
    rigorous mpmath interval at ``digits`` decimal digits and ``value`` its
    midpoint.
    """

    tag: str = "PLUS"
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if self.tag not in ("PLUS", "MINUS"):
            raise DomainError(f"unknown embedding tag {self.tag!r}")

    @property
    def direction(self) -> int:
        return 1 if self.tag == "PLUS" else -1

    def sign(self, f) -> int:
        f = as_element(f)
        a, b = _split(f)
        sa, sb = _sign_q2(a), _sign_q2(b) * self.direction
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # |A| vs |B x|: compare A^2 with B^2 sqrt2, both in Q(sqrt 2)
        d = a * a - b * b * SQRT2
        return sa if _sign_q2(d) > 0 else sb

    def compare(self, f, g) -> int:
        return self.sign(as_element(f) - as_element(g))

    def interval(self, f):
        f = as_element(f)
        saved = iv.dps
        iv.dps = self.digits + 10
        try:
            x = iv.sqrt(iv.sqrt(iv.mpf(2))) * self.direction
            acc = iv.mpf(0)
            for c in reversed(f.coords):
                acc = acc * x + iv.mpf(c.numerator) / c.denominator
            return acc
        finally:
            iv.dps = saved

    def value(self, f) -> mpmath.mpf:
        lo, hi = self.interval(f)._mpi_
        with mpmath.workdps(self.digits):
            return (mpmath.mp.make_mpf(lo) + mpmath.mp.make_mpf(hi)) / 2

    def __call__(self, f) -> float:
        return float(self.value(f))


PLUS = Embedding("PLUS")
MINUS = Embedding("MINUS")


def complex_value(f: FieldElement, digits: int = DEFAULT_DIGITS) -> mpmath.mpc:
    """Value under the complex embedding x -> i * 2^(1/4)."""
    with mpmath.workdps(digits):
        x = mpmath.mpc(0, mpmath.root(2, 4))
        acc = mpmath.mpc(0)
        for c in reversed(f.coords):
            acc = acc * x + mpmath.mpf(c.numerator) / c.denominator
        return acc


def conjugate_values(f: FieldElement, digits: int = DEFAULT_DIGITS):
    """(PLUS value, MINUS value, complex value) of f."""
    emb = Embedding("PLUS", digits)
    return (
        emb.value(f),
        Embedding("MINUS", digits).value(f),
        complex_value(f, digits),
    )


# ---------------------------------------------------------------------------
# The unit group U_0
# ---------------------------------------------------------------------------


def _near_multiples_of_sqrt2(beta: int, radius: int, strict: bool) -> list[int]:
    """Positive integers alpha with |alpha - beta*sqrt2| <= 1 (or < 1 if strict)."""
    center = math.isqrt(2 * beta * beta)
    out = []
    for alpha in range(max(1, center - radius), center + radius + 2):
        s_hi = _sign_qsqrt2(Fraction(alpha - 1), Fraction(-beta))  # alpha - 1 - beta*sqrt2
        s_lo = _sign_qsqrt2(Fraction(alpha + 1), Fraction(-beta))  # alpha + 1 - beta*sqrt2
        ok = (s_hi < 0 and s_lo > 0) if strict else (s_hi <= 0 and s_lo >= 0)
        if ok:
            out.append(alpha)
    return out


def _box_candidates(bound: FieldElement):
    """Positive-coefficient v = (a1 + b1 sqrt2) + (a2 + b2 sqrt2) x below ``bound``
    satisfying |a1 - b1 sqrt2| <= 1 and |a2 - b2 sqrt2| < 1."""
    top = float(PLUS.value(bound)) + 1.0
    r = 2 ** 0.25
    b1_max = int(top / math.sqrt(2)) + 1
    b2_max = int(top / (r ** 3)) + 1
    firsts = []
    for b1 in range(1, b1_max + 1):
        for a1 in _near_multiples_of_sqrt2(b1, 2, strict=False):
            part = FieldElement(a1, 0, b1)
            if PLUS.compare(part, bound) < 0:
                firsts.append((a1, b1))
    seconds = []
    for b2 in range(1, b2_max + 1):
        for a2 in _near_multiples_of_sqrt2(b2, 2, strict=True):
            part = FieldElement(0, a2, 0, b2)
            if PLUS.compare(part, bound) < 0:
                seconds.append((a2, b2))
    for a1, b1 in firsts:
        for a2, b2 in seconds:
            v = FieldElement(a1, a2, b1, b2)
            if PLUS.compare(v, bound) < 0:
                yield v


def verify_fundamental_unit(generator: Optional[FieldElement] = None) -> Report:
    """Check that ``generator`` (default u_0) generates U_0 up to sign.

    Three exact checks: tau(g) g = 1; no v with positive coefficients in the
    finite box cut out by |a1 - b1 sqrt2| <= 1, |a2 - b2 sqrt2| < 1, v < g
    satisfies tau(v) v = 1 and 1 < v < g; and the least admissible box value
    exceeds sqrt(g). Raises VerificationFailed with a witness otherwise.
    """
    g = U0 if generator is None else as_element(generator)
    params = {"generator": g.to_text()}
    with stopwatch() as sw:
        if not (g.is_integral and galois_tau(g) * g == ONE):
            raise VerificationFailed(
                "generator does not satisfy tau(g) g = 1",
                {"stage": "tau_identity", "generator": g.to_text()},
            )
        if PLUS.sign(g - 1) <= 0:
            raise VerificationFailed(
                "generator must exceed 1 in the PLUS embedding",
                {"stage": "normalisation", "generator": g.to_text()},
            )

        examined = 0
        hits = []
        square_roots = []
        least = None
        for v in _box_candidates(g):
            examined += 1
            if least is None or PLUS.compare(v, least) < 0:
                least = v
            if galois_tau(v) * v == ONE and PLUS.sign(v - 1) > 0:
                hits.append(v)
                if v * v == g:
                    square_roots.append(v)
        if hits:
            raise VerificationFailed(
                "found a unit of U_0 strictly between 1 and the generator",
                {
                    "stage": "box_search",
                    "generator": g.to_text(),
                    "counterexamples": [h.to_text() for h in hits],
                    "square_roots": [h.to_text() for h in square_roots],
                },
            )
        if least is None or PLUS.sign(least * least - g) <= 0:
            raise VerificationFailed(
                "least admissible candidate does not exceed sqrt(generator)",
                {
                    "stage": "least_candidate",
                    "generator": g.to_text(),
                    "least_candidate": None if least is None else least.to_text(),
                },
            )
        witness = {
            "tau_identity": True,
            "generator_value": float(PLUS.value(g)),
            "candidates_examined": examined,
            "least_candidate": least.to_text(),
            "least_candidate_value": float(PLUS.value(least)),
            "sqrt_generator_value": float(mpmath.sqrt(PLUS.value(g))),
            "square_roots_found": 0,
        }
    return Report("verify_fundamental_unit", PASS, witness, sw.elapsed_ms, params)


def unit_decompose(v: FieldElement) -> tuple[int, int]:
    """Return (sign, k) with v = sign * u_0**k for v in U_0."""
    v = as_element(v)
    if not is_unit(v) or galois_tau(v) * v != ONE:
        raise DomainError(f"{v.to_text()} is not in U_0")
    with mpmath.workdps(DEFAULT_DIGITS):
        val = abs(Embedding("PLUS", DEFAULT_DIGITS + v.height.bit_length()).value(v))
        guess = int(mpmath.nint(mpmath.log(val) / mpmath.log(PLUS.value(U0))))
    for k in (guess, guess - 1, guess + 1):
        p = U0 ** k
        if v == p:
            return 1, k
        if v == -p:
            return -1, k
    raise InternalError(f"{v.to_text()} in U_0 but not +-u0^k near k={guess}")


def _to_fraction(x, bound: int) -> Fraction:
    return Fraction(mpmath.nstr(x, mpmath.mp.dps, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)).limit_denominator(bound)


def _real_roots(y, m: int) -> list:
    if m % 2:
        r = mpmath.root(abs(y), m)
        return [r if y >= 0 else -r]
    if y < 0:
        return []
    r = mpmath.root(y, m)
    return [r, -r]


def is_mth_power(a, m: int, denom_bound: int = 10**6) -> Optional[FieldElement]:
    """Find c in L with c**m == a, or return None.

    None means no root whose coordinates have denominators <= denom_bound
    was found; it is not a proof that no root exists. Units of U_0 are
    handled exactly through :func:`unit_decompose`; other inputs go through
    numeric root extraction in every embedding followed by rational
    reconstruction and exact confirmation.
    """
    a = as_element(a)
    if not a:
        raise DomainError("is_mth_power requires a nonzero element")
    if m < 1:
        raise DomainError("m must be a positive integer")
    if m == 1:
        return a

    if in_u0(a):
        sign, k = unit_decompose(a)
        if k % m == 0:
            root = U0 ** (k // m)
            if sign > 0:
                return root
            if m % 2:
                return -root

    digits = DEFAULT_DIGITS + 4 * len(str(a.height)) + 2 * len(str(denom_bound))
    with mpmath.workdps(digits):
        yp, ym, yc = conjugate_values(a, digits)
        plus_roots = _real_roots(yp, m)
        minus_roots = _real_roots(ym, m)
        if not plus_roots or not minus_roots:
            return None
        modulus = mpmath.root(abs(yc), m)
        phase = mpmath.arg(yc)
        complex_roots = [
            modulus * mpmath.expj((phase + 2 * mpmath.pi * j) / m) for j in range(m)
        ]
        r = mpmath.root(2, 4)
        s2 = mpmath.sqrt(2)
        tol = mpmath.mpf(10) ** (-(digits // 3))
        for p in plus_roots:
            for q in minus_roots:
                even = (p + q) / 2
                odd = (p - q) / (2 * r)
                for w in complex_roots:
                    raw = (
                        (even + w.real) / 2,
                        (odd + w.imag / r) / 2,
                        (even - w.real) / (2 * s2),
                        (odd - w.imag / r) / (2 * s2),
                    )
                    coords = [_to_fraction(c, denom_bound) for c in raw]
                    if any(abs(c - mpmath.mpf(f.numerator) / f.denominator) > tol for c, f in zip(raw, coords)):
                        continue
                    cand = FieldElement(*coords)
                    if cand ** m == a:
                        return cand
    return None


def parse_elements(texts: Iterable[str]) -> list[FieldElement]:
    return [FieldElement.parse(t) for t in texts]
