"""Finite quotient rings Z[x]/(x^4 - 2, m) and linear algebra over Z/m.

Congruence levels are rational-integer moduli m (typically p^k). The ring
O_L/(m) surjects onto every O_L/P^j with P^j | m, so any obstruction found
at such a level is an obstruction at level m as well.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, ShapeError, SizeError
from .qfield import FieldElement, _mul_coeffs, as_element, field_norm

MAX_SQUARE_MODULUS = 64


def _check_modulus(m: int) -> int:
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise DomainError(f"modulus must be an integer >= 2, got {m!r}")
    return int(m)


class ModElement:
    """Element of Z[x]/(x^4 - 2, m), stored as four residues in [0, m)."""

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs: Sequence[int], modulus: int):
        m = _check_modulus(modulus)
        if len(coeffs) != 4:
            raise ShapeError("a ModElement has exactly four coefficients")
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "coeffs", tuple(int(c) % m for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("ModElement is immutable")

    @classmethod
    def one(cls, m: int) -> "ModElement":
        return cls((1, 0, 0, 0), m)

    @classmethod
    def zero(cls, m: int) -> "ModElement":
        return cls((0, 0, 0, 0), m)

    def _peer(self, other) -> "ModElement":
        if isinstance(other, ModElement):
            if other.modulus != self.modulus:
                raise DomainError("moduli differ")
            return other
        if isinstance(other, int):
            return ModElement((other, 0, 0, 0), self.modulus)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            other = ModElement((other, 0, 0, 0), self.modulus)
        if not isinstance(other, ModElement):
            return NotImplemented
        return self.modulus == other.modulus and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.modulus))

    def __repr__(self):
        return f"ModElement({self.coeffs}, {self.modulus})"

    def __bool__(self):
        return any(self.coeffs)

    def __add__(self, other):
        other = self._peer(other)
        if other is NotImplemented:
            return other
        return ModElement([a + b for a, b in zip(self.coeffs, other.coeffs)], self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return ModElement([-a for a in self.coeffs], self.modulus)

    def __sub__(self, other):
        other = self._peer(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._peer(other)
        if other is NotImplemented:
            return other
        return ModElement(_mul_coeffs(self.coeffs, other.coeffs), self.modulus)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = ModElement.one(self.modulus)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def norm(self) -> int:
        """Determinant of multiplication-by-self on (Z/m)^4, reduced mod m."""
        return int(field_norm(FieldElement(*self.coeffs))) % self.modulus

    @property
    def is_unit(self) -> bool:
        return math.gcd(self.norm(), self.modulus) == 1

    def inverse(self) -> "ModElement":
        if not self.is_unit:
            raise DomainError(f"{self!r} is not invertible")
        # the unit group is finite, so self^(order - 1) is the inverse
        one = ModElement.one(self.modulus)
        prev, p = one, self
        while p != one:
            prev, p = p, p * self
        return prev

    def galois_tau(self) -> "ModElement":
        c = self.coeffs
        return ModElement((c[0], -c[1], c[2], -c[3]), self.modulus)


def reduce(r, m: int) -> ModElement:
    """Coefficient-wise reduction O_L -> O_L/(m)."""
    r = as_element(r)
    if not r.is_integral:
        raise DomainError(f"{r.to_text()} is not integral")
    return ModElement([int(c) for c in r.coords], m)


def lift(e: ModElement) -> FieldElement:
    """Canonical lift with coefficients in [0, m)."""
    return FieldElement(*e.coeffs)


def _encode(c0, c1, c2, c3, m):
    return ((c0 * m + c1) * m + c2) * m + c3


@lru_cache(maxsize=16)
def _square_mask(m: int) -> np.ndarray:
    """Boolean table over encoded elements: True where the element is a square."""
    m = _check_modulus(m)
    if m > MAX_SQUARE_MODULUS:
        raise SizeError(f"exhaustive square enumeration limited to m <= {MAX_SQUARE_MODULUS}")
    grid = np.indices((m, m, m, m), dtype=np.int64).reshape(4, -1)
    sq = _mul_coeffs(tuple(grid), tuple(grid))
    sq = [s % m for s in sq]
    mask = np.zeros(m ** 4, dtype=bool)
    mask[_encode(*sq, m)] = True
    return mask


def all_squares(m: int) -> frozenset:
    """Exact set {e^2 : e in Z[x]/(x^4 - 2, m)} by exhaustive enumeration."""
    mask = _square_mask(m)
    idx = np.flatnonzero(mask)
    out = []
    for code in idx.tolist():
        c3 = code % m
        code //= m
        c2 = code % m
        code //= m
        c1 = code % m
        c0 = code // m
        out.append(ModElement((c0, c1, c2, c3), m))
    return frozenset(out)


def is_square(e: ModElement) -> bool:
    mask = _square_mask(e.modulus)
    return bool(mask[_encode(*e.coeffs, e.modulus)])


def square_roots(e: ModElement) -> list[ModElement]:
    """All r with r^2 = e (exhaustive)."""
    m = e.modulus
    _square_mask(m)  # size guard
    grid = np.indices((m, m, m, m), dtype=np.int64).reshape(4, -1)
    sq = [s % m for s in _mul_coeffs(tuple(grid), tuple(grid))]
    hit = np.ones(grid.shape[1], dtype=bool)
    for s, c in zip(sq, e.coeffs):
        hit &= s == c
    return [ModElement(tuple(int(v) for v in grid[:, i]), m) for i in np.flatnonzero(hit)]


def power_orbit(e: ModElement) -> list[ModElement]:
    """The cyclic group generated by e: [1, e, e^2, ...] up to the first repeat.

    Raises DomainError if e is not invertible (the sequence never returns to 1).
    """
    one = ModElement.one(e.modulus)
    orbit = [one]
    seen = {one}
    p = e
    while p != one:
        if p in seen:
            raise DomainError(f"{e!r} is not invertible")
        orbit.append(p)
        seen.add(p)
        p = p * e
    return orbit


def no_power_hits_minus_one(u, m: int) -> bool:
    """True iff -1 is not of the form u^k (mod m) for any integer k.

    The powers of an invertible element form a finite cyclic group, so the
    positive orbit already contains every u^k with k negative.
    """
    e = reduce(u, m)
    if not e.is_unit:
        raise DomainError(f"{as_element(u).to_text()} is not invertible mod {m}")
    minus_one = ModElement((-1, 0, 0, 0), m)
    return minus_one not in power_orbit(e)


# ---------------------------------------------------------------------------
# Matrices over Z[x]/(x^4 - 2, m)
# ---------------------------------------------------------------------------


class ModMatrix:
    """Square or rectangular matrix with ModElement entries."""

    def __init__(self, rows: Sequence[Sequence[ModElement]]):
        rows = tuple(tuple(r) for r in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("ragged or empty matrix")
        self.rows = rows
        self.modulus = rows[0][0].modulus

    @classmethod
    def identity(cls, n: int, m: int) -> "ModMatrix":
        one, zero = ModElement.one(m), ModElement.zero(m)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def __eq__(self, other):
        return isinstance(other, ModMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"ModMatrix({[[e.coeffs for e in r] for r in self.rows]}, m={self.modulus})"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "ModMatrix") -> "ModMatrix":
        n, k = self.shape
        k2, p = other.shape
        if k != k2:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        zero = ModElement.zero(self.modulus)
        out = []
        for i in range(n):
            row = []
            for j in range(p):
                acc = zero
                for t in range(k):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return ModMatrix(out)

    def det(self) -> ModElement:
        n, k = self.shape
        if n != k:
            raise ShapeError("determinant of a non-square matrix")
        total = ModElement.zero(self.modulus)
        for perm in itertools.permutations(range(n)):
            term = ModElement.one(self.modulus)
            for i, j in enumerate(perm):
                term = term * self.rows[i][j]
                if not term:
                    break
            else:
                total = total + term if _perm_sign(perm) > 0 else total - term
        return total

    def is_identity(self) -> bool:
        n, k = self.shape
        return n == k and self == ModMatrix.identity(n, self.modulus)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Linear algebra over Z/m
# ---------------------------------------------------------------------------


@dataclass
class KernelModule:
    """Solution module {v in (Z/m)^c : A v = 0} with generators and their orders.

    ``basis_change`` is the unimodular V (mod m) from the diagonalisation
    U A V = D and ``basis_change_inv`` its inverse; a vector v lies in the
    module iff V^-1 v has the i-th coordinate divisible by m / order_i for the
    generator directions and zero elsewhere.
    """

    modulus: int
    generators: list[tuple[int, ...]]
    orders: list[int]
    basis_change: list[list[int]]
    basis_change_inv: list[list[int]]
    _directions: list[int]

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    @property
    def is_trivial(self) -> bool:
        return not self.generators

    def contains(self, v: Sequence[int]) -> bool:
        m = self.modulus
        w = [sum(r[j] * v[j] for j in range(len(v))) % m for r in self.basis_change_inv]
        allowed = dict(zip(self._directions, self.orders))
        for i, wi in enumerate(w):
            if i in allowed:
                if wi % (m // allowed[i]):
                    return False
            elif wi:
                return False
        return True

    def combine(self, coefficients: Sequence[int]) -> tuple[int, ...]:
        m = self.modulus
        dim = len(self.basis_change)
        out = [0] * dim
        for c, g in zip(coefficients, self.generators):
            if c:
                for j in range(dim):
                    out[j] += c * g[j]
        return tuple(x % m for x in out)

    def elements(self) -> Iterator[tuple[int, ...]]:
        """Every element, ordered by support size and then lexicographically."""
        k = len(self.generators)
        yield self.combine([0] * k)
        for support in range(1, k + 1):
            for idx in itertools.combinations(range(k), support):
                ranges = [range(1, self.orders[i]) for i in idx]
                for vals in itertools.product(*ranges):
                    coeffs = [0] * k
                    for i, v in zip(idx, vals):
                        coeffs[i] = v
                    yield self.combine(coeffs)


def _xgcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _pivot_combo(p: int, e: int):
    # plain elimination when p | e keeps the pivot column untouched, which
    # guarantees termination: the pivot only ever changes by strictly shrinking
    if e % p == 0:
        return p, 1, 0
    return _xgcd(p, e)


def smith_diagonalize(A: Sequence[Sequence[int]], m: int):
    """Diagonalise A over Z/m by unimodular row and column operations.

    Returns (diag, V, Vinv) with U A V = D (mod m) for some unimodular U,
    ``diag`` the diagonal entries of D (length min(rows, cols)) and V, Vinv
    mutually inverse mod m. The divisibility chain is not enforced; the
    kernel computation does not need it.
    """
    m = _check_modulus(m)
    M = [[int(x) % m for x in row] for row in A]
    r = len(M)
    c = len(M[0]) if r else 0
    V = [[int(i == j) for j in range(c)] for i in range(c)]
    Vinv = [[int(i == j) for j in range(c)] for i in range(c)]

    def col_op(j1, j2, a, b, cc, d):
        # columns (j1, j2) <- (a*col_j1 + cc*col_j2, b*col_j1 + d*col_j2), det = ad - bc = 1
        for mat in (M, V):
            for row in mat:
                x, y = row[j1], row[j2]
                row[j1] = (a * x + cc * y) % m
                row[j2] = (b * x + d * y) % m
        # inverse acts on rows of Vinv
        x_row, y_row = Vinv[j1], Vinv[j2]
        Vinv[j1] = [(d * x - b * y) % m for x, y in zip(x_row, y_row)]
        Vinv[j2] = [(-cc * x + a * y) % m for x, y in zip(x_row, y_row)]

    def row_op(i1, i2, a, b, cc, d):
        x_row, y_row = M[i1], M[i2]
        M[i1] = [(a * x + b * y) % m for x, y in zip(x_row, y_row)]
        M[i2] = [(cc * x + d * y) % m for x, y in zip(x_row, y_row)]

    t = 0
    while t < min(r, c):
        # choose the nonzero entry with the smallest residue gcd with m as pivot
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if M[i][j]:
                    key = (math.gcd(M[i][j], m), M[i][j])
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            M[pi], M[t] = M[t], M[pi]
        if pj != t:
            for mat in (M, V):
                for row in mat:
                    row[t], row[pj] = row[pj], row[t]
            Vinv[t], Vinv[pj] = Vinv[pj], Vinv[t]
        while True:
            changed = False
            for i in range(t + 1, r):
                if M[i][t]:
                    g, s, q = _pivot_combo(M[t][t], M[i][t])
                    a_, b_ = M[t][t] // g, M[i][t] // g
                    row_op(t, i, s, q, -b_, a_)
                    changed = True
            for j in range(t + 1, c):
                if M[t][j]:
                    g, s, q = _pivot_combo(M[t][t], M[t][j])
                    a_, b_ = M[t][t] // g, M[t][j] // g
                    col_op(t, j, s, -b_, q, a_)
                    changed = True
            if not changed:
                break
            if all(M[i][t] == 0 for i in range(t + 1, r)) and all(
                M[t][j] == 0 for j in range(t + 1, c)
            ):
                break
        t += 1
    diag = [M[i][i] for i in range(min(r, c))]
    return diag, V, Vinv


def solve_linear_mod(A: Sequence[Sequence[int]], m: int) -> KernelModule:
    """Kernel of A over Z/m as a module with generators and annihilator orders."""
    m = _check_modulus(m)
    if not A or not A[0]:
        raise ShapeError("empty coefficient matrix")
    cols = len(A[0])
    diag, V, Vinv = smith_diagonalize(A, m)
    generators, orders, directions = [], [], []
    for i in range(cols):
        d = diag[i] if i < len(diag) else 0
        g = math.gcd(d, m)  # gcd(0, m) = m: free direction
        if g == 1:
            continue
        step = m // g
        generators.append(tuple((step * V[row][i]) % m for row in range(cols)))
        orders.append(g)
        directions.append(i)
    return KernelModule(m, generators, orders, V, Vinv, directions)


def mat_vec_mod(A: Sequence[Sequence[int]], v: Sequence[int], m: int) -> list[int]:
    return [sum(a * x for a, x in zip(row, v)) % m for row in A]
