"""Rational computations in sl_n: Cartan pieces, adjoint actions and wedge powers.

Matrices are tuples of Fraction rows and indices in public names are
1-based (E_ij, f_ij = E_ij + E_ji).  The symmetric part p carries an
orthogonal basis for the trace form; squared norms are stored instead of
normalising, so everything stays rational.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import DomainError, InternalError, SizeError, VerificationFailed
from .linalg import FieldMatrix, inverse, kernel
from .qfield import FieldElement
from .report import PASS, Report, stopwatch

WEDGE_GUARD = 5000


# ---------------------------------------------------------------------------
# Lie vectors
# ---------------------------------------------------------------------------

class LieVector:
    """A traceless rational n x n matrix."""

    __slots__ = ("m",)

    def __init__(self, rows: Iterable[Iterable], check: bool = True):
        m = tuple(tuple(Fraction(x) for x in r) for r in rows)
        if check and sum(m[i][i] for i in range(len(m))) != 0:
            raise DomainError("Lie vectors must be traceless")
        self.m = m

    @property
    def n(self) -> int:
        return len(self.m)

    @classmethod
    def zero(cls, n: int) -> "LieVector":
        return cls([[0] * n for _ in range(n)])

    def __eq__(self, other):
        if not isinstance(other, LieVector):
            return NotImplemented
        return self.m == other.m

    def __hash__(self):
        return hash(self.m)

    def __repr__(self):
        return f"LieVector({[[str(x) for x in r] for r in self.m]})"

    def __add__(self, other: "LieVector") -> "LieVector":
        return LieVector([[a + b for a, b in zip(r, s)] for r, s in zip(self.m, other.m)], check=False)

    def __neg__(self):
        return LieVector([[-a for a in r] for r in self.m], check=False)

    def __sub__(self, other: "LieVector") -> "LieVector":
        return self + (-other)

    def __mul__(self, c):
        c = Fraction(c)
        return LieVector([[a * c for a in r] for r in self.m], check=False)

    __rmul__ = __mul__

    def __bool__(self):
        return any(x for r in self.m for x in r)

    def is_symmetric(self) -> bool:
        n = self.n
        return all(self.m[i][j] == self.m[j][i] for i in range(n) for j in range(i + 1, n))

    def is_antisymmetric(self) -> bool:
        n = self.n
        return all(self.m[i][j] == -self.m[j][i] for i in range(n) for j in range(i, n))

    def to_field_matrix(self) -> FieldMatrix:
        return FieldMatrix([[FieldElement(x) for x in r] for r in self.m])


def _matmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n) if A[i][k] and B[k][j]) for j in range(n)]
            for i in range(n)]


def _trace_product(A, B) -> Fraction:
    n = len(A)
    return sum((A[i][k] * B[k][i] for i in range(n) for k in range(n)), Fraction(0))


def ad(X: LieVector, Y: LieVector) -> LieVector:
    """The bracket [X, Y] = XY - YX."""
    XY, YX = _matmul(X.m, Y.m), _matmul(Y.m, X.m)
    return LieVector([[a - b for a, b in zip(r, s)] for r, s in zip(XY, YX)], check=False)


def E(n: int, i: int, j: int) -> list[list[Fraction]]:
    """Matrix unit E_ij (1-based); not traceless when i == j."""
    out = [[Fraction(0)] * n for _ in range(n)]
    out[i - 1][j - 1] = Fraction(1)
    return out


def p_elem(n: int, i: int, j: int) -> LieVector:
    """f_ij = E_ij + E_ji for i != j."""
    if i == j:
        raise DomainError("f_ij needs i != j")
    m = E(n, i, j)
    m[j - 1][i - 1] = Fraction(1)
    return LieVector(m)


def k_elem(n: int, i: int, j: int) -> LieVector:
    """E_ij - E_ji."""
    m = E(n, i, j)
    m[j - 1][i - 1] -= 1
    return LieVector(m)


def u_rot(n: int) -> LieVector:
    """The rotation generator E_1n - E_n1."""
    return k_elem(n, 1, n)


def h_vec(n: int) -> LieVector:
    """H = E_11 - E_nn."""
    m = E(n, 1, 1)
    m[n - 1][n - 1] = Fraction(-1)
    return LieVector(m)


# ---------------------------------------------------------------------------
# Cartan pieces
# ---------------------------------------------------------------------------

class CartanPieces:
    """Bases of k (antisymmetric) and p (symmetric traceless) in sl_n.

    p is ordered as: the diagonal part, starting with H and completed by
    Gram-Schmidt to an orthogonal basis of the traceless diagonals, followed
    by f_ij for i < j in lexicographic order.  ``p_sqnorms`` holds the
    trace-form squared norms.
    """

    def __init__(self, n: int):
        if n < 2:
            raise DomainError("need n >= 2")
        self.n = n
        self.k_basis = [k_elem(n, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        self.k_labels = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        diag = [h_vec(n)]
        for i in range(2, n):
            m = E(n, i, i)
            m[n - 1][n - 1] = Fraction(-1)
            v = LieVector(m)
            for d in diag:
                v = v - d * (_trace_product(v.m, d.m) / _trace_product(d.m, d.m))
            diag.append(v)
        self.p_basis = diag + [p_elem(n, i, j) for i, j in self.k_labels]
        self.p_labels = ["H"] + [f"d{i}" for i in range(2, n)] + list(self.k_labels)
        self.p_sqnorms = [_trace_product(b.m, b.m) for b in self.p_basis]
        self._index = {lab: idx for idx, lab in enumerate(self.p_labels)}

    @property
    def dim_p(self) -> int:
        return len(self.p_basis)

    @property
    def dim_k(self) -> int:
        return len(self.k_basis)

    def index(self, label) -> int:
        if isinstance(label, tuple):
            label = tuple(sorted(label))
        return self._index[label]

    def coords(self, Y: LieVector) -> list[Fraction]:
        if not Y.is_symmetric():
            raise DomainError("vector is not in p")
        return [_trace_product(Y.m, b.m) / s for b, s in zip(self.p_basis, self.p_sqnorms)]

    def from_coords(self, c: Sequence) -> LieVector:
        out = LieVector.zero(self.n)
        for x, b in zip(c, self.p_basis):
            if x:
                out = out + b * x
        return out


_PIECES: dict[int, CartanPieces] = {}


def cartan_pieces(n: int) -> CartanPieces:
    if n not in _PIECES:
        _PIECES[n] = CartanPieces(n)
    return _PIECES[n]


def ad_on_p(X: LieVector, pieces: CartanPieces | None = None) -> list[list[Fraction]]:
    """Matrix of ad(X) on p in the stored basis (column j = image of basis j)."""
    pieces = pieces or cartan_pieces(X.n)
    cols = []
    for b in pieces.p_basis:
        img = ad(X, b)
        if not img.is_symmetric():
            raise DomainError("ad(X) does not preserve p")
        cols.append(pieces.coords(img))
    d = pieces.dim_p
    return [[cols[j][i] for j in range(d)] for i in range(d)]


# ---------------------------------------------------------------------------
# Exterior powers of p
# ---------------------------------------------------------------------------

def _sort_sign(idx: list[int]) -> tuple[int, tuple]:
    """Sign of the sorting permutation, or 0 on a repeated index."""
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    idx = list(idx)
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class WedgeVector:
    """Element of the k-th exterior power, stored on sorted index tuples."""

    __slots__ = ("k", "coeffs")

    def __init__(self, k: int, coeffs: dict | None = None):
        self.k = k
        self.coeffs: dict[tuple, Fraction] = {}
        for idx, c in (coeffs or {}).items():
            self.add(idx, c)

    def add(self, idx: Sequence[int], c) -> None:
        if len(idx) != self.k:
            raise DomainError(f"expected {self.k} indices")
        sign, key = _sort_sign(list(idx))
        if not sign or not c:
            return
        v = self.coeffs.get(key, Fraction(0)) + sign * Fraction(c)
        if v:
            self.coeffs[key] = v
        else:
            self.coeffs.pop(key, None)

    def __getitem__(self, idx) -> Fraction:
        sign, key = _sort_sign(list(idx))
        return sign * self.coeffs.get(key, Fraction(0)) if sign else Fraction(0)

    def __eq__(self, other):
        return isinstance(other, WedgeVector) and self.k == other.k and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"WedgeVector({self.k}, {self.coeffs})"


def wedge_basis(dim: int, k: int) -> list[tuple]:
    return list(itertools.combinations(range(dim), k))


class WedgeOperator:
    """Sparse linear map on the k-th exterior power: entries[(row, col)]."""

    def __init__(self, dim: int, k: int, entries: dict):
        self.dim, self.k = dim, k
        self.basis = wedge_basis(dim, k)
        self.entries = entries

    def apply(self, v: WedgeVector) -> WedgeVector:
        out = WedgeVector(self.k)
        cols: dict = {}
        for (r, c), x in self.entries.items():
            cols.setdefault(c, []).append((r, x))
        for idx, coef in v.coeffs.items():
            for r, x in cols.get(idx, ()):
                out.add(r, coef * x)
        return out

    def trace(self) -> Fraction:
        return sum((x for (r, c), x in self.entries.items() if r == c), Fraction(0))

    def to_domain_matrix(self) -> DomainMatrix:
        pos = {b: i for i, b in enumerate(self.basis)}
        rows: dict = {}
        for (r, c), x in self.entries.items():
            rows.setdefault(pos[r], {})[pos[c]] = QQ(x.numerator, x.denominator)
        size = len(self.basis)
        return DomainMatrix(rows, (size, size), QQ)

    def is_zero(self) -> bool:
        return not self.entries


def _derivation(A: list[list[Fraction]], k: int) -> WedgeOperator:
    d = len(A)
    col_support = [[(i, A[i][j]) for i in range(d) if A[i][j]] for j in range(d)]
    entries: dict = {}
    for idx in wedge_basis(d, k):
        for s, j in enumerate(idx):
            for i, a in col_support[j]:
                new = list(idx)
                new[s] = i
                sign, key = _sort_sign(new)
                if sign:
                    entries[key, idx] = entries.get((key, idx), Fraction(0)) + sign * a
    return WedgeOperator(d, k, {key: v for key, v in entries.items() if v})


def wedge_ad(X: LieVector, k: int, pieces: CartanPieces | None = None) -> WedgeOperator:
    """Derivation extension of ad(X) to the k-th exterior power of p."""
    pieces = pieces or cartan_pieces(X.n)
    return _derivation(ad_on_p(X, pieces), k)


def wedge_power(A: list[list[Fraction]], k: int) -> WedgeOperator:
    """The k-th exterior power of a linear map: e_I -> Ae_i1 ^ ... ^ Ae_ik."""
    d = len(A)
    col_support = [[(i, A[i][j]) for i in range(d) if A[i][j]] for j in range(d)]
    entries: dict = {}
    for idx in wedge_basis(d, k):
        for choice in itertools.product(*(col_support[j] for j in idx)):
            sign, key = _sort_sign([i for i, _ in choice])
            if sign:
                c = Fraction(sign)
                for _, a in choice:
                    c *= a
                entries[key, idx] = entries.get((key, idx), Fraction(0)) + c
    return WedgeOperator(d, k, {key: v for key, v in entries.items() if v})


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def invariant_forms(n: int, k: int) -> list[WedgeVector]:
    """Basis of the ad(k)-annihilated part of the k-th exterior power of p.

    Forms are identified with vectors through the trace form; the identification
    rescales each basis wedge by a nonzero constant, so a coordinate vanishes
    on the form side exactly when it vanishes here.
    """
    pieces = cartan_pieces(n)
    size = math.comb(pieces.dim_p, k)
    if size > WEDGE_GUARD:
        raise SizeError(f"exterior power has dimension {size} > {WEDGE_GUARD}")
    if k == 0:
        return [WedgeVector(0, {(): 1})]
    basis = wedge_basis(pieces.dim_p, k)
    blocks = [wedge_ad(X, k, pieces).to_domain_matrix() for X in pieces.k_basis]
    stacked = blocks[0]
    for b in blocks[1:]:
        stacked = stacked.vstack(b)
    ns = stacked.nullspace()
    out = []
    for dense in ns.to_list():
        vec = WedgeVector(k)
        for j, x in enumerate(dense):
            if x:
                vec.add(basis[j], _to_fraction(x))
        out.append(vec)
    return out


def normal_index(n: int) -> tuple:
    """Sorted indices of f_1n, ..., f_(n-1)n in the p basis."""
    pieces = cartan_pieces(n)
    return tuple(sorted(pieces.index((i, n)) for i in range(1, n)))


def v0_basis(n: int) -> list[WedgeVector]:
    """f_1n ^ ... ^ f_(n-1)n  and  H ^ f_12 ^ ... ^ f_1(n-1)."""
    pieces = cartan_pieces(n)
    k = n - 1
    first = WedgeVector(k, {tuple(pieces.index((i, n)) for i in range(1, n)): 1})
    second = WedgeVector(k, {tuple([pieces.index("H")] + [pieces.index((1, i)) for i in range(2, n)]): 1})
    return [first, second]


def _coords_in(vs: list[WedgeVector], w: WedgeVector):
    """Coordinates of w in the span of basis wedges vs (each a single basis tuple), or None."""
    keys = [next(iter(v.coeffs)) for v in vs]
    coeff = [w.coeffs.get(key, Fraction(0)) / vs[i].coeffs[key] for i, key in enumerate(keys)]
    rest = {key: c for key, c in w.coeffs.items() if key not in keys}
    return coeff, rest


def v0_action(n: int, exterior: bool = False) -> dict:
    """How u_rot acts on V0.

    With ``exterior`` False the derivation extension is used, otherwise the
    exterior power of ad(u_rot).  Returns the 2x2 matrix of the projection
    onto V0 (row j holds the image of the j-th basis vector), whether V0 is
    invariant, and the components leaving V0.
    """
    pieces = cartan_pieces(n)
    A = ad_on_p(u_rot(n), pieces)
    op = wedge_power(A, n - 1) if exterior else _derivation(A, n - 1)
    vs = v0_basis(n)
    matrix = [[Fraction(0)] * 2 for _ in range(2)]
    leaks = []
    for j, v in enumerate(vs):
        img = op.apply(v)
        coeff, rest = _coords_in(vs, img)
        for i in range(2):
            matrix[j][i] = coeff[i]
        if rest:
            leaks.append(rest)
    det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    return {"matrix": matrix, "invariant": not leaks, "det": det, "leaks": leaks}


def krylov_closure(n: int) -> dict:
    """Smallest derivation-invariant subspace W containing V0, and whether ad(u_rot)|W is invertible.

    The derivation is skew for the induced metric, so W has an invariant
    complement; if the restriction is invertible, every annihilated vector
    has zero component in W, in particular on the normal wedge.
    """
    pieces = cartan_pieces(n)
    k = n - 1
    op = _derivation(ad_on_p(u_rot(n), pieces), k)
    basis = wedge_basis(pieces.dim_p, k)
    pos = {b: i for i, b in enumerate(basis)}

    def dense(v: WedgeVector):
        row = {}
        for key, c in v.coeffs.items():
            row[pos[key]] = QQ(c.numerator, c.denominator)
        return row

    span = list(v0_basis(n))
    frontier = list(span)
    while frontier:
        nxt = []
        for v in frontier:
            w = op.apply(v)
            trial = span + [w]
            M = DomainMatrix({i: dense(x) for i, x in enumerate(trial)}, (len(trial), len(basis)), QQ)
            if M.rank() > len(span):
                span.append(w)
                nxt.append(w)
        frontier = nxt
    S = DomainMatrix({i: dense(x) for i, x in enumerate(span)}, (len(span), len(basis)), QQ)
    images = DomainMatrix({i: dense(op.apply(x)) for i, x in enumerate(span)}, (len(span), len(basis)), QQ)
    # images = R * S for the restricted matrix R; R is invertible iff images has full rank
    nonsingular = images.rank() == len(span)
    return {"dim": len(span), "nonsingular": nonsingular, "rank": S.rank()}


def ad_relations(n: int) -> dict:
    """Check the four u_rot relations on p; returns flags and the scalars a, b."""
    u, H = u_rot(n), h_vec(n)
    ok_in = all(ad(u, p_elem(n, i, n)) == p_elem(n, 1, i) for i in range(2, n))
    ok_1i = all(ad(u, p_elem(n, 1, i)) == -p_elem(n, i, n) for i in range(2, n))
    img = ad(u, p_elem(n, 1, n))
    a = img.m[0][0]
    ok_a = bool(a) and img == H * a
    img = ad(u, H)
    b = img.m[0][n - 1]
    ok_b = bool(b) and img == p_elem(n, 1, n) * b
    return {"e_in": ok_in, "e_1i": ok_1i, "e_1n": ok_a, "H": ok_b, "a": a, "b": b,
            "ok": ok_in and ok_1i and ok_a and ok_b}


def check_normal_coefficient(forms: Sequence[WedgeVector], n: int) -> None:
    """Raise VerificationFailed if some form has a nonzero normal coefficient."""
    key = normal_index(n)
    for f in forms:
        c = f.coeffs.get(key, Fraction(0))
        if c:
            raise VerificationFailed(
                f"form has coefficient {c} on the normal wedge",
                witness={"coefficients": {str(k): str(v) for k, v in f.coeffs.items()}},
            )


def normal_coefficient_vanishes(n: int) -> Report:
    """Every invariant (n-1)-form has zero coefficient on the normal wedge."""
    params = {"n": n}
    with stopwatch() as sw:
        forms = invariant_forms(n, n - 1)
        check_normal_coefficient(forms, n)
        v0 = v0_action(n)
        kry = krylov_closure(n)
    params.update({
        "invariant_dim": len(forms),
        "v0_derivation_invariant": v0["invariant"],
        "v0_exterior_power_matrix": [[str(x) for x in r] for r in v0_action(n, exterior=True)["matrix"]],
        "krylov_dim": kry["dim"],
        "krylov_nonsingular": kry["nonsingular"],
    })
    return Report("normal_coefficient", PASS, elapsed_ms=sw.elapsed_ms, params=params)


# ---------------------------------------------------------------------------
# Transversality
# ---------------------------------------------------------------------------

def _as_rational_matrix(k) -> FieldMatrix:
    if isinstance(k, FieldMatrix):
        M = k
    else:
        M = FieldMatrix([[FieldElement(x) for x in r] for r in k])
    if not all(x.is_rational for x in M.flatten()):
        raise DomainError("matrix must be rational")
    return M


def _check_orthogonal(k: FieldMatrix) -> None:
    if not k.is_square or k.T @ k != FieldMatrix.identity(k.n_rows):
        raise DomainError("matrix is not orthogonal")


def conjugated_singular_vector(k) -> FieldMatrix:
    """k u k^-1 for u = diag(1, ..., 1, -(n-1)), computed two ways.

    The closed form writes c for the last column of k: with c' its first
    n-1 entries and z its last, the blocks are I - n c'c'^T, -n z c',
    -n z c'^T and 1 - n z^2.
    """
    from .intersection import u_sing

    k = _as_rational_matrix(k)
    _check_orthogonal(k)
    n = k.n_rows
    direct = k @ u_sing(n) @ k.T
    c = [k[i, n - 1] for i in range(n - 1)]
    z = k[n - 1, n - 1]
    rows = []
    for i in range(n - 1):
        rows.append([(1 if i == j else 0) - n * c[i] * c[j] for j in range(n - 1)] + [-n * z * c[i]])
    rows.append([-n * z * c[j] for j in range(n - 1)] + [1 - n * z * z])
    closed = FieldMatrix(rows)
    if closed != direct:
        raise InternalError("closed form disagrees with direct conjugation")
    return direct


def transversality_check(k) -> bool:
    """Whether Ad(k) of the diagonal traceless matrices meets p_1 only in 0."""
    from .intersection import u_sing

    k = _as_rational_matrix(k)
    _check_orthogonal(k)
    n = k.n_rows
    u = u_sing(n)
    cols = []
    for i in range(n - 1):
        d = FieldMatrix.diag([1 if j == i else (-1 if j == n - 1 else 0) for j in range(n)])
        Y = k @ d @ k.T
        cols.append((Y @ u - u @ Y).flatten())
    M = FieldMatrix([[cols[j][r] for j in range(n - 1)] for r in range(n * n)])
    return len(kernel(M)) == 0


def cayley(A) -> FieldMatrix:
    """(I - A)(I + A)^-1 for rational antisymmetric A: a rational rotation."""
    A = _as_rational_matrix(A)
    if A.T != -A:
        raise DomainError("Cayley transform needs an antisymmetric matrix")
    I = FieldMatrix.identity(A.n_rows)
    return (I - A) @ inverse(I + A)


def random_rotation(n: int, rng: random.Random, bound: int = 3) -> FieldMatrix:
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            x = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
            A[i][j], A[j][i] = x, -x
    return cayley(A)


# ---------------------------------------------------------------------------
# Numeric cross-check by averaging over rotations
# ---------------------------------------------------------------------------

def _haar_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def invariant_dimension_numeric(n: int, k: int, samples: int = 2000, seed: int = 0) -> float:
    """Average trace of the k-th exterior power of Ad(R) over random rotations R.

    The average approximates the dimension of the invariant subspace.  The
    trace of an exterior power is an elementary symmetric function of the
    eigenvalues, read off the characteristic polynomial.
    """
    pieces = cartan_pieces(n)
    basis = [np.array(b.m, dtype=float) for b in pieces.p_basis]
    norms = [math.sqrt(float(s)) for s in pieces.p_sqnorms]
    onb = [b / s for b, s in zip(basis, norms)]
    B = np.array([b.ravel() for b in onb]).T
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(samples):
        R = _haar_rotation(n, rng)
        M = np.array([(R @ b @ R.T).ravel() for b in onb]).T
        A = B.T @ M
        coeffs = np.poly(A)
        total += ((-1) ** k) * coeffs[k].real
    return total / samples
