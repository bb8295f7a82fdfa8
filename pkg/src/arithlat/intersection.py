"""Intersection bookkeeping for a flat and a product-type cycle.

The central object is the linear system in the unknown matrix a

    a t = (g t g^-1) a,      a u = u a,

where g is a lattice element, t a regular rational direction of the flat and
u = diag(1, ..., 1, -(n-1)) the singular direction.  A one-dimensional
solution space with an invertible generator a leads, after normalising
det a to 1, to the factorisation g = a_bar * b_bar checked by
``sign_criterion``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, InvalidInput, ShapeError, SizeError
from .lattice import LatticeElement, LatticeSpec, a_generator, b_generator
from .linalg import FieldMatrix, adjugate, det, inverse, kernel, trace
from .modring import ModElement, ModMatrix, solve_linear_mod
from .qfield import ONE, PLUS, ZERO, FieldElement, is_mth_power

MAX_SCAN = 10 ** 6


def u_sing(n: int) -> FieldMatrix:
    """diag(1, ..., 1, -(n-1))."""
    return FieldMatrix.diag([ONE] * (n - 1) + [FieldElement(-(n - 1))])


def _as_matrix(g) -> FieldMatrix:
    return g.g if isinstance(g, LatticeElement) else g


# ---------------------------------------------------------------------------
# Polynomials over L, for the regularity test on t
# ---------------------------------------------------------------------------

def char_poly(A: FieldMatrix) -> list[FieldElement]:
    """Characteristic polynomial det(xI - A), coefficients low to high.

    Faddeev-LeVerrier recursion; exact since L has characteristic zero.
    """
    n = A.n_rows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    M = FieldMatrix.zeros(n)
    I = FieldMatrix.identity(n)
    for k in range(1, n + 1):
        M = A @ M + I * coeffs[n - k + 1]
        coeffs[n - k] = -trace(A @ M) / k
    return coeffs


def _trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _poly_mod(a: list, b: list) -> list:
    a = _trim(a)
    inv_lead = b[-1].inverse()
    while len(a) >= len(b):
        f = a[-1] * inv_lead
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - f * c
        a = _trim(a)
    return a


def poly_gcd(a: list, b: list) -> list:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_mod(a, b)
    if not a:
        return a
    lead = a[-1].inverse()
    return [c * lead for c in a]


def is_squarefree(p: list) -> bool:
    p = _trim(p)
    deriv = [c * i for i, c in enumerate(p)][1:]
    return len(poly_gcd(p, deriv)) == 1


@dataclass(frozen=True)
class TorusDirection:
    """A rational direction of the flat; must have distinct eigenvalues."""

    t: FieldMatrix

    def __post_init__(self):
        if not self.t.is_square:
            raise ShapeError("torus direction must be square")
        if not is_squarefree(char_poly(self.t)):
            raise InvalidInput("torus direction has a repeated eigenvalue")

    @property
    def n(self) -> int:
        return self.t.n_rows


def _as_direction(t) -> TorusDirection:
    return t if isinstance(t, TorusDirection) else TorusDirection(t)


# ---------------------------------------------------------------------------
# The linear system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StarSystem:
    """Coefficient matrix of the system in the n^2 entries of a (row-major)."""

    gamma: FieldMatrix
    t: FieldMatrix
    u: FieldMatrix
    matrix: FieldMatrix

    @property
    def n(self) -> int:
        return self.t.n_rows


def _assemble(n: int, t: FieldMatrix, s: FieldMatrix, u: FieldMatrix, scale_lhs=ONE) -> list[list]:
    """Rows for scale_lhs * (a t) - s a = 0 followed by a u - u a = 0."""
    rows = []
    for i in range(n):
        for j in range(n):
            row = [ZERO] * (n * n)
            for k in range(n):
                if t[k, j]:
                    row[i * n + k] = row[i * n + k] + scale_lhs * t[k, j]
                if s[i, k]:
                    row[k * n + j] = row[k * n + j] - s[i, k]
            rows.append(row)
    for i in range(n):
        for j in range(n):
            row = [ZERO] * (n * n)
            row[i * n + j] = u[j, j] - u[i, i]
            rows.append(row)
    return rows


def build_star_system(gamma, t, spec: LatticeSpec | None = None) -> StarSystem:
    g = _as_matrix(gamma)
    td = _as_direction(t)
    n = td.n
    if g.shape != (n, n) or (spec is not None and spec.n != n):
        raise ShapeError("gamma, t and the lattice size disagree")
    s = g @ td.t @ inverse(g)
    u = u_sing(n)
    return StarSystem(g, td.t, u, FieldMatrix(_assemble(n, td.t, s, u)))


def solution_basis(sys: StarSystem) -> list[FieldMatrix]:
    n = sys.n
    return [FieldMatrix.from_flat(v.flatten(), n, n) for v in kernel(sys.matrix)]


def solution_dimension(sys: StarSystem) -> int:
    return len(kernel(sys.matrix))


# ---------------------------------------------------------------------------
# Solutions modulo m
# ---------------------------------------------------------------------------

@dataclass
class ModSolution:
    """Outcome of the mod-m search; ``witness`` is a solution matrix when found."""

    modulus: int
    clearing_factor: int
    module_size: int
    scanned: int
    witness: Optional[ModMatrix]
    solvable: bool


def _integral_system(sys: StarSystem) -> tuple[list[list[FieldElement]], int]:
    """Integral form  det(g) * a t' - g t' adj(g) a = 0,  a u - u a = 0,  t' = lam * t."""
    g = sys.gamma
    if not g.is_integral:
        raise DomainError("gamma must be integral for reduction modulo m")
    lam = 1
    for x in sys.t.flatten():
        lam = lam * x.denominator // math.gcd(lam, x.denominator)
    tp = sys.t * lam
    s = g @ tp @ adjugate(g)
    rows = _assemble(sys.n, tp, s, sys.u, scale_lhs=det(g))
    return rows, lam


def _expand(rows: list[list[FieldElement]], m: int) -> list[list[int]]:
    """Replace each coefficient by its 4x4 multiplication matrix over Z/m."""
    out = []
    for row in rows:
        blocks = [c.mul_matrix() for c in row]
        for r in range(4):
            out.append([int(blocks[j][r][cidx]) % m for j in range(len(row)) for cidx in range(4)])
    return out


def _vector_to_matrix(v: Sequence[int], n: int, m: int) -> ModMatrix:
    return ModMatrix([[ModElement(v[4 * (i * n + j): 4 * (i * n + j) + 4], m) for j in range(n)]
                      for i in range(n)])


def find_mod_solution(sys: StarSystem, m: int, require_invertible: bool = False,
                      scan_limit: int = MAX_SCAN) -> ModSolution:
    """Search for a solution of the system over O_L/(m).

    Without ``require_invertible`` any nonzero solution counts.  Otherwise
    the kernel module is scanned in a fixed order for a solution whose
    determinant is a unit; when the module exceeds ``scan_limit`` and no
    witness turned up among the first ``scan_limit`` elements, SizeError is
    raised rather than a guess.
    """
    rows, lam = _integral_system(sys)
    module = solve_linear_mod(_expand(rows, m), m)
    n = sys.n
    size = module.size
    if not require_invertible:
        if module.is_trivial:
            return ModSolution(m, lam, size, 0, None, False)
        return ModSolution(m, lam, size, 0, _vector_to_matrix(module.generators[0], n, m), True)
    scanned = 0
    for v in module.elements():
        if scanned >= scan_limit:
            raise SizeError(f"kernel module has {size} elements, no invertible solution among the first {scan_limit}")
        scanned += 1
        a = _vector_to_matrix(v, n, m)
        if a.det().is_unit:
            return ModSolution(m, lam, size, scanned, a, True)
    return ModSolution(m, lam, size, scanned, None, False)


def solvable_mod(sys: StarSystem, m: int, require_invertible: bool = False) -> bool:
    return find_mod_solution(sys, m, require_invertible).solvable


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------

def _check_block_diagonal(a: FieldMatrix, n: int) -> None:
    if a.shape != (n, n):
        raise ShapeError(f"expected a {n}x{n} matrix")
    if not a.commutes_with(u_sing(n)):
        raise DomainError("matrix does not commute with the singular direction")


def orientation_preserving(abar: FieldMatrix, spec: LatticeSpec | int) -> bool:
    """Whether abar preserves the orientation of the product-type cycle.

    For even n always; for odd n exactly when the lower-right entry is
    positive in the PLUS embedding.
    """
    n = spec if isinstance(spec, int) else spec.n
    _check_block_diagonal(abar, n)
    if det(abar) != ONE:
        raise DomainError("matrix must have determinant 1")
    if n % 2 == 0:
        return True
    return PLUS.sign(abar[n - 1, n - 1]) > 0


def _p1_basis(n: int) -> list[np.ndarray]:
    """Symmetric traceless block-diagonal matrices (upper (n-1)-block and corner)."""
    basis = []
    for i in range(n - 1):
        B = np.zeros((n, n))
        B[i, i], B[n - 1, n - 1] = 1.0, -1.0
        basis.append(B)
    for i in range(n - 1):
        for j in range(i + 1, n - 1):
            B = np.zeros((n, n))
            B[i, j] = B[j, i] = 1.0
            basis.append(B)
    return basis


def orientation_sign_numeric(abar: FieldMatrix) -> int:
    """Sign of det Ad(k) on the block-diagonal tangent space, k the polar part.

    Independent floating-point check of ``orientation_preserving``.
    """
    n = abar.n_rows
    M = np.array([[PLUS(x) for x in row] for row in abar.rows])
    U, _, Vt = np.linalg.svd(M)
    k = U @ Vt
    basis = _p1_basis(n)
    B = np.array([b.ravel() for b in basis]).T
    images = np.array([(k @ b @ k.T).ravel() for b in basis]).T
    coords, *_ = np.linalg.lstsq(B, images, rcond=None)
    return 1 if np.linalg.det(coords) > 0 else -1


# ---------------------------------------------------------------------------
# The sign criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamePositive:
    abar: FieldMatrix
    bbar: FieldMatrix
    status: str = "same_positive"


@dataclass(frozen=True)
class Unresolved:
    stage: str
    reason: str = ""
    status: str = "unresolved"


def _check_witness(g: FieldMatrix, t: FieldMatrix, abar: FieldMatrix, bbar: FieldMatrix):
    n = g.n_rows
    u = u_sing(n)
    if abar @ bbar != g:
        return Unresolved("condition 1", "gamma != abar * bbar")
    if bbar @ t != t @ bbar:
        return Unresolved("condition 2", "bbar does not commute with t")
    if abar @ u != u @ abar:
        return Unresolved("condition 3", "abar does not commute with u")
    if det(abar) != ONE:
        return Unresolved("condition 4", "det abar != 1")
    if not orientation_preserving(abar, n):
        return Unresolved("condition 5", "abar reverses orientation")
    return SamePositive(abar, bbar)


def sign_criterion(gamma, t, spec: LatticeSpec | None = None, denom_bound: int = 10 ** 6):
    """Run the factorisation pipeline; returns SamePositive or Unresolved."""
    g = _as_matrix(gamma)
    td = _as_direction(t)
    n = td.n
    if g == FieldMatrix.identity(n):
        # the basepoint itself: certified by the trivial factorisation
        return _check_witness(g, td.t, g, g)
    sys = build_star_system(g, td, spec)
    basis = solution_basis(sys)
    if len(basis) != 1:
        return Unresolved("kernel dimension", f"solution space has dimension {len(basis)}")
    a = basis[0]
    d = det(a)
    if not d:
        return Unresolved("invertibility", "solution is singular")
    c = is_mth_power(d, n, denom_bound)
    if c is None:
        return Unresolved("nth root", f"det a has no {n}-th root within the bound")
    abar = a / c
    bbar = inverse(abar) @ g
    return _check_witness(g, td.t, abar, bbar)


# ---------------------------------------------------------------------------
# Constructed instances
# ---------------------------------------------------------------------------

def default_direction(n: int = 3) -> FieldMatrix:
    """k0 diag(1, 2, 3) k0^T for the rational rotation k0."""
    if n != 3:
        raise DomainError("a default direction is provided for n = 3 only")
    k0 = K0
    return k0 @ FieldMatrix.diag([1, 2, 3]) @ k0.T


# A size-3 lattice member moving the diagonal flat into transverse position:
# the product of two hyperbolic 2x2 members acting on coordinates (1, 3) and
# (1, 2).  Found by bounded enumeration and frozen here.
CONJUGATOR_3 = FieldMatrix.from_dict({"entries": [
    ["-1 0 -1 0", "-2 0 -1 0", "-2 2 -1 1"],
    ["-1 -1 -1 -1", "-1 -1 -1 -1", "0 0 0 0"],
    ["-1 0 -1 0", "-2 0 -1 0", "-1 1 -1 1"],
]})


def constructed_instance() -> tuple[LatticeElement, FieldMatrix]:
    """(gamma, t) with gamma = a0 * b0 and b0 commuting with the regular t.

    a0 = b_generator(I_2, 1) commutes with u; b0 is the conjugate of
    diag(u0, u0^-1, 1) by CONJUGATOR_3 and t the matching conjugate of
    diag(1, 2, 3).
    """
    spec = LatticeSpec(3)
    g = LatticeElement(CONJUGATOR_3, spec)
    a0 = b_generator(spec, FieldMatrix.identity(2), 1)
    b0 = g @ a_generator(spec, [1, -1, 0]) @ g.inverse()
    t = g.g @ FieldMatrix.diag([1, 2, 3]) @ g.inverse().g
    return a0 @ b0, t


def degenerate_instance() -> tuple[LatticeElement, FieldMatrix]:
    """gamma = a0 * diag(u0, u0^-1, 1) with diagonal t: the solution space is 3-dimensional."""
    spec = LatticeSpec(3)
    a0 = b_generator(spec, FieldMatrix.identity(2), 1)
    return a0 @ a_generator(spec, [1, -1, 0]), FieldMatrix.diag([1, 2, 3])


K0 = FieldMatrix([[FieldElement(a) / 3 for a in row] for row in [[2, -2, 1], [2, 1, -2], [1, 2, 2]]])


# ---------------------------------------------------------------------------
# Double cosets
# ---------------------------------------------------------------------------

@dataclass
class DoubleCoset:
    """The class H_side * rep * T_side for finitely generated side subgroups."""

    rep: LatticeElement
    h_gens: list = field(default_factory=list)
    t_gens: list = field(default_factory=list)


@dataclass(frozen=True)
class Yes:
    h: FieldMatrix
    t: FieldMatrix


@dataclass(frozen=True)
class Unknown:
    reason: str = "word bound exhausted"


def _words(gens: list[LatticeElement], bound: int, budget: list) -> dict:
    """All products of at most ``bound`` generators or inverses, keyed by matrix."""
    if not gens:
        return {}
    n = gens[0].n
    letters = []
    for g in gens:
        letters.extend([g, g.inverse()])
    ident = LatticeElement(FieldMatrix.identity(n), gens[0].spec, certified=True)
    seen = {ident.g: ident}
    frontier = [ident]
    for _ in range(bound):
        nxt = []
        for w in frontier:
            for x in letters:
                budget[0] -= 1
                if budget[0] < 0:
                    raise SizeError("word search budget exhausted")
                p = w @ x
                if p.g not in seen:
                    seen[p.g] = p
                    nxt.append(p)
        frontier = nxt
    return seen


def same_double_coset(d1: DoubleCoset, d2: DoubleCoset, word_len_bound: int,
                      budget: int = 10 ** 6):
    """Bounded meet-in-the-middle search for h, t' with rep2 = h rep1 t'."""
    n = d1.rep.n
    ident = FieldMatrix.identity(n)
    if d1.rep.g == d2.rep.g:
        return Yes(ident, ident)
    left = [budget]
    hw = _words(d1.h_gens, word_len_bound, left) or {ident: None}
    tw = _words(d1.t_gens, word_len_bound, left) or {ident: None}
    # h^-1 rep2 = rep1 t'
    right = {}
    for tm in sorted(tw, key=repr):
        right.setdefault(d1.rep.g @ tm, tm)
    for hm in sorted(hw, key=repr):
        key = inverse(hm) @ d2.rep.g
        if key in right:
            tm = right[key]
            if hm @ d1.rep.g @ tm == d2.rep.g:
                return Yes(hm, tm)
    return Unknown()
