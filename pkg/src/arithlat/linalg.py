"""Exact dense linear algebra over L = Q[2^(1/4)]."""

from __future__ import annotations

import json
from typing import Callable, Iterable, Sequence

from .errors import ParseError, ShapeError, SingularError
from .qfield import ONE, ZERO, FieldElement, as_element, galois_tau


class FieldMatrix:
    """Immutable matrix with FieldElement entries.

    Supports ``+``, ``-``, ``@`` (matrix product) and ``*`` by scalars.
    """

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(as_element(x) for x in row) for row in rows)
        if not rows or not rows[0]:
            raise ShapeError("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("FieldMatrix is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "FieldMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int | None = None) -> "FieldMatrix":
        n_cols = n_rows if n_cols is None else n_cols
        return cls([[ZERO] * n_cols for _ in range(n_rows)])

    @classmethod
    def diag(cls, entries: Sequence) -> "FieldMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, entries: Sequence) -> "FieldMatrix":
        return cls([[e] for e in entries])

    @classmethod
    def block_diag(cls, *blocks: "FieldMatrix") -> "FieldMatrix":
        n = sum(b.n_rows for b in blocks)
        m = sum(b.n_cols for b in blocks)
        out = [[ZERO] * m for _ in range(n)]
        r = c = 0
        for b in blocks:
            for i in range(b.n_rows):
                for j in range(b.n_cols):
                    out[r + i][c + j] = b.rows[i][j]
            r += b.n_rows
            c += b.n_cols
        return cls(out)

    # -- basic protocol ---------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.rows))
        return self._hash

    def __repr__(self):
        body = "; ".join(", ".join(e.to_text() for e in row) for row in self.rows)
        return f"FieldMatrix[{body}]"

    def map(self, fn: Callable[[FieldElement], FieldElement]) -> "FieldMatrix":
        return FieldMatrix([[fn(x) for x in row] for row in self.rows])

    def tau(self) -> "FieldMatrix":
        """Entry-wise Galois automorphism x -> -x."""
        return self.map(galois_tau)

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(zip(*self.rows))

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return FieldMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, FieldMatrix):
            return NotImplemented
        s = as_element(scalar)
        return self.map(lambda x: x * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = as_element(scalar).inverse()
        return self * s

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.n_cols != other.n_rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.rows))
        out = []
        for row in self.rows:
            new_row = []
            for col in cols:
                acc = ZERO
                for a, b in zip(row, col):
                    if a and b:
                        acc = acc + a * b
                new_row.append(acc)
            out.append(new_row)
        return FieldMatrix(out)

    def __pow__(self, k: int) -> "FieldMatrix":
        if not self.is_square:
            raise ShapeError("power of a non-square matrix")
        base = self if k >= 0 else inverse(self)
        result = FieldMatrix.identity(self.n_rows)
        k = abs(k)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    @property
    def is_integral(self) -> bool:
        return all(x.is_integral for row in self.rows for x in row)

    def is_diagonal(self) -> bool:
        return all(not x for i, row in enumerate(self.rows) for j, x in enumerate(row) if i != j)

    def commutes_with(self, other: "FieldMatrix") -> bool:
        return self @ other == other @ self

    def flatten(self) -> list[FieldElement]:
        return [x for row in self.rows for x in row]

    @classmethod
    def from_flat(cls, values: Sequence, n_rows: int, n_cols: int) -> "FieldMatrix":
        return cls([values[i * n_cols:(i + 1) * n_cols] for i in range(n_rows)])

    # -- serialisation ----------------------------------------------------

    def to_dict(self) -> dict:
        return {"n": self.n_rows, "entries": [[x.to_text() for x in row] for row in self.rows]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "FieldMatrix":
        try:
            entries = data["entries"]
        except (KeyError, TypeError) as exc:
            raise ParseError("matrix JSON needs an 'entries' field") from exc
        if not isinstance(entries, list) or not entries:
            raise ParseError("'entries' must be a non-empty list of rows")
        rows = []
        for row in entries:
            if not isinstance(row, list):
                raise ParseError("each row must be a list")
            rows.append([_parse_entry(x) for x in row])
        try:
            mat = cls(rows)
        except ShapeError as exc:
            raise ParseError(str(exc)) from exc
        n = data.get("n")
        if n is not None and n != mat.n_rows:
            raise ParseError(f"'n' is {n} but there are {mat.n_rows} rows")
        return mat

    @classmethod
    def from_json(cls, text: str) -> "FieldMatrix":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def _parse_entry(x) -> FieldElement:
    if isinstance(x, str):
        parts = x.split()
        if len(parts) == 1:
            return FieldElement(parts[0])
        return FieldElement.parse(x)
    if isinstance(x, list):
        if len(x) != 4:
            raise ParseError(f"entry must have four coordinates: {x!r}")
        return FieldElement(*(str(c) if not isinstance(c, int) else c for c in x))
    if isinstance(x, int):
        return FieldElement(x)
    raise ParseError(f"cannot parse matrix entry {x!r}")


def _height(x: FieldElement) -> int:
    return x.height if x else 0


def det(A: FieldMatrix) -> FieldElement:
    """Determinant by fraction-free (Bareiss) elimination over L."""
    if not A.is_square:
        raise ShapeError(f"determinant of a {A.shape} matrix")
    n = A.n_rows
    M = [list(r) for r in A.rows]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        # nonzero pivot of least height keeps coefficient growth down
        candidates = [i for i in range(k, n) if M[i][k]]
        if not candidates:
            return ZERO
        p = min(candidates, key=lambda i: _height(M[i][k]))
        if p != k:
            M[k], M[p] = M[p], M[k]
            sign = -sign
        pivot = M[k][k]
        inv_prev = prev.inverse()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (pivot * M[i][j] - M[i][k] * M[k][j]) * inv_prev
            M[i][k] = ZERO
        prev = pivot
    d = M[n - 1][n - 1]
    return d if sign > 0 else -d


def rref(A: FieldMatrix) -> tuple[list[list[FieldElement]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in A.rows]
    n_rows, n_cols = A.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        candidates = [i for i in range(r, n_rows) if M[i][c]]
        if not candidates:
            continue
        p = min(candidates, key=lambda i: _height(M[i][c]))
        M[r], M[p] = M[p], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv if x else x for x in M[r]]
        for i in range(n_rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b if b else a for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A: FieldMatrix) -> int:
    return len(rref(A)[1])


def kernel(A: FieldMatrix) -> list[FieldMatrix]:
    """Basis of the right null space, one column vector per free variable.

    Each basis vector has a 1 in its free coordinate and zeros in the other
    free coordinates, so the basis is canonical.
    """
    R, pivots = rref(A)
    n_cols = A.n_cols
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n_cols
        v[f] = ONE
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(FieldMatrix.column(v))
    return basis


def inverse(A: FieldMatrix) -> FieldMatrix:
    """Exact inverse by Gauss-Jordan elimination on [A | I]."""
    if not A.is_square:
        raise ShapeError(f"inverse of a {A.shape} matrix")
    n = A.n_rows
    aug = FieldMatrix([list(row) + [ONE if i == j else ZERO for j in range(n)]
                       for i, row in enumerate(A.rows)])
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularError("matrix is singular")
    return FieldMatrix([row[n:] for row in R])


def solve(A: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    """Solve A x = b for square invertible A."""
    return inverse(A) @ b


def adjugate(A: FieldMatrix) -> FieldMatrix:
    """Classical adjoint; entries are polynomial in those of A."""
    if not A.is_square:
        raise ShapeError("adjugate of a non-square matrix")
    n = A.n_rows
    if n == 1:
        return FieldMatrix([[ONE]])
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = FieldMatrix([[A.rows[r][c] for c in range(n) if c != j]
                                 for r in range(n) if r != i])
            d = det(minor)
            out[j][i] = d if (i + j) % 2 == 0 else -d
    return FieldMatrix(out)


def trace(A: FieldMatrix) -> FieldElement:
    acc = ZERO
    for i in range(min(A.shape)):
        acc = acc + A.rows[i][i]
    return acc
