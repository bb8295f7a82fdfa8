"""The arithmetic lattice of integral matrices preserving a hermitian-type form.

An n x n matrix g over O_L = Z[x] is in the lattice when

    tau(g)^T D g = D,   det g = 1,   D = diag(-1, sqrt2, ..., sqrt2),

with tau applied entry-wise.  The module provides membership tests, the two
families of explicit members used by the surrounding constructions, reduction
modulo an integer level, the symmetric-space displacement of a member and a
bounded enumeration of members near the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .errors import DomainError, PrecisionError, ShapeError, SizeError
from .linalg import FieldMatrix, det
from .modring import ModMatrix, reduce
from .qfield import ONE, PLUS, SQRT2, U0, ZERO, Embedding, FieldElement, galois_tau

_R = 2 ** 0.25
_S = math.sqrt(2)


@dataclass(frozen=True)
class LatticeSpec:
    """Size of the lattice together with its diagonal form D."""

    n: int

    def __post_init__(self):
        # n = 2 is allowed: it is needed for the upper-left block of b_generator
        if not isinstance(self.n, int) or self.n < 2:
            raise DomainError(f"lattice size must be an integer >= 2, got {self.n!r}")

    @property
    def D(self) -> FieldMatrix:
        return FieldMatrix.diag([-ONE] + [SQRT2] * (self.n - 1))

    @property
    def form_diagonal(self) -> list[FieldElement]:
        return [-ONE] + [SQRT2] * (self.n - 1)


def _relation_holds(g: FieldMatrix, spec: LatticeSpec) -> bool:
    D = spec.D
    return g.tau().T @ D @ g == D


def is_member(g: FieldMatrix, spec: LatticeSpec) -> bool:
    """Exact membership test."""
    if g.shape != (spec.n, spec.n):
        raise ShapeError(f"expected a {spec.n}x{spec.n} matrix, got {g.shape}")
    return g.is_integral and det(g) == ONE and _relation_holds(g, spec)


class LatticeElement:
    """A matrix that has been checked to lie in the lattice."""

    __slots__ = ("g", "spec", "certified")

    def __init__(self, g: FieldMatrix, spec: LatticeSpec, certified: bool = False):
        if not certified and not is_member(g, spec):
            raise DomainError("matrix is not a member of the lattice")
        self.g = g
        self.spec = spec
        self.certified = True

    @classmethod
    def certify(cls, g: FieldMatrix, spec: LatticeSpec | None = None) -> "LatticeElement":
        spec = spec or LatticeSpec(g.n_rows)
        return cls(g, spec)

    @property
    def n(self) -> int:
        return self.spec.n

    def __eq__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self.g == other.g

    def __hash__(self):
        return hash(self.g)

    def __repr__(self):
        return f"LatticeElement({self.g!r})"

    def __matmul__(self, other: "LatticeElement") -> "LatticeElement":
        if other.spec != self.spec:
            raise ShapeError("elements belong to lattices of different size")
        # the product of members is a member; no need to re-check
        return LatticeElement(self.g @ other.g, self.spec, certified=True)

    def inverse(self) -> "LatticeElement":
        """Exact inverse D^-1 tau(g)^T D, integral because D is diagonal with unit ratios."""
        D = self.spec.D
        Dinv = FieldMatrix.diag([x.inverse() for x in self.spec.form_diagonal])
        return LatticeElement(Dinv @ self.g.tau().T @ D, self.spec, certified=True)

    def __pow__(self, k: int) -> "LatticeElement":
        base = self if k >= 0 else self.inverse()
        out = LatticeElement(FieldMatrix.identity(self.n), self.spec, certified=True)
        for _ in range(abs(k)):
            out = out @ base
        return out

    def to_dict(self) -> dict:
        d = self.g.to_dict()
        d["certified"] = self.certified
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeElement":
        g = FieldMatrix.from_dict(data)
        return cls(g, LatticeSpec(g.n_rows))


def identity(spec: LatticeSpec) -> LatticeElement:
    return LatticeElement(FieldMatrix.identity(spec.n), spec, certified=True)


def a_generator(spec: LatticeSpec, exponents: Sequence[int]) -> LatticeElement:
    """diag(u0^k1, ..., u0^kn) for exponents summing to zero."""
    if len(exponents) != spec.n:
        raise ShapeError(f"need {spec.n} exponents, got {len(exponents)}")
    if sum(exponents) != 0:
        raise DomainError(f"exponents must sum to zero, got {sum(exponents)}")
    return LatticeElement(FieldMatrix.diag([U0 ** k for k in exponents]), spec)


def b_generator(spec: LatticeSpec, h: LatticeElement | FieldMatrix, k: int) -> LatticeElement:
    """Block element diag(u0^-k * h, u0^(k(n-1))) with h in the (n-1)-lattice.

    The upper-left block is scaled by u0^-k and the corner carries
    u0^(k(n-1)), which makes the determinant 1.
    """
    n = spec.n
    if n < 3:
        raise DomainError("b_generator needs n >= 3")
    hm = h.g if isinstance(h, LatticeElement) else h
    if hm.shape != (n - 1, n - 1):
        raise ShapeError(f"h must be {n - 1}x{n - 1}, got {hm.shape}")
    if not is_member(hm, LatticeSpec(n - 1)):
        raise DomainError("h is not a member of the smaller lattice")
    scale = U0 ** (-k)
    g = FieldMatrix.block_diag(hm * scale, FieldMatrix([[U0 ** (k * (n - 1))]]))
    return LatticeElement(g, spec)


def reduce_matrix(g: LatticeElement | FieldMatrix, m: int) -> ModMatrix:
    """Entry-wise reduction modulo m."""
    gm = g.g if isinstance(g, LatticeElement) else g
    return ModMatrix([[reduce(x, m) for x in row] for row in gm.rows])


def in_congruence_kernel(g: LatticeElement | FieldMatrix, m: int) -> bool:
    return reduce_matrix(g, m).is_identity()


# ---------------------------------------------------------------------------
# Distance in the symmetric space
# ---------------------------------------------------------------------------

def _numeric_matrix(g, emb: Embedding):
    if isinstance(g, LatticeElement):
        g = g.g
    if isinstance(g, FieldMatrix):
        return mpmath.matrix([[emb.value(x) for x in row] for row in g.rows])
    return mpmath.matrix([[mpmath.mpf(x) for x in row] for row in g])


def symmetric_space_distance(g, emb: Embedding = PLUS) -> mpmath.mpf:
    """sqrt(sum log(s_i)^2) over the singular values of the embedded matrix.

    ``g`` may be a LatticeElement, a FieldMatrix or a nested list of reals.
    """
    with mpmath.workdps(emb.digits):
        A = _numeric_matrix(g, emb)
        if A.rows != A.cols:
            raise ShapeError("distance needs a square matrix")
        sigma = mpmath.svd_r(A, compute_uv=False)
        floor = mpmath.mpf(10) ** (-(emb.digits // 2))
        if min(sigma) <= floor:
            raise PrecisionError("smallest singular value cannot be resolved")
        return mpmath.sqrt(mpmath.fsum(mpmath.log(s) ** 2 for s in sigma))


def _fast_distance(M: np.ndarray) -> float:
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= 0:
        return math.inf
    return float(np.sqrt(np.sum(np.log(s) ** 2)))


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

MAX_BOX = 8
MAX_ENUM_N = 5
DEFAULT_NODE_BUDGET = 10 ** 8


@dataclass
class EnumerationResult:
    """Members found, and whether the node budget ran out first."""

    members: list
    budget_exhausted: bool
    nodes: int
    params: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, item):
        g = item.g if isinstance(item, LatticeElement) else item
        return any(m.g == g for m in self.members)


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self) -> bool:
        self.used += 1
        return self.used <= self.limit


def _entry_candidates(B: int, Dcap: float):
    """Integral entries in the box, with their embedding values.

    Returns coordinates and values for each (row class, column class); row
    class 0 is the first row, column class 0 the first column.  Under the
    complex embedding the relation says each column is a unit vector for
    the weights w = (1, sqrt2, ..., sqrt2), so |rho_c(g_ij)|^2 <= w_j / w_i.
    """
    rng = np.arange(-B, B + 1)
    c = np.array(np.meshgrid(rng, rng, rng, rng, indexing="ij")).reshape(4, -1).T
    plus = c[:, 0] + c[:, 1] * _R + c[:, 2] * _R ** 2 + c[:, 3] * _R ** 3
    minus = c[:, 0] - c[:, 1] * _R + c[:, 2] * _R ** 2 - c[:, 3] * _R ** 3
    cre = c[:, 0] - c[:, 2] * _S
    cim = _R * (c[:, 1] - c[:, 3] * _S)
    cabs2 = cre ** 2 + cim ** 2
    slack = 1e-9
    real_ok = (np.abs(plus) <= math.exp(Dcap) + slack) & (np.abs(minus) <= _S * math.exp(Dcap) + slack)
    weights = (1.0, _S)
    out = {}
    for ri in (0, 1):
        for cj in (0, 1):
            mask = real_ok & (cabs2 <= weights[cj] / weights[ri] + slack)
            idx = np.nonzero(mask)[0]
            # small complex norm first keeps the partial sums tight early
            idx = idx[np.argsort(cabs2[idx], kind="stable")]
            out[ri, cj] = [
                (FieldElement(*map(int, c[k])), float(cabs2[k]), complex(cre[k], cim[k]), float(plus[k]))
                for k in idx
            ]
    return out


def _rel_norm(f: FieldElement) -> FieldElement:
    """f * tau(f), which lies in Q(sqrt2)."""
    return f * galois_tau(f)


def _columns(spec: LatticeSpec, cj: int, cands, budget: _Budget) -> tuple[list, bool]:
    n = spec.n
    wts = [1.0] + [_S] * (n - 1)
    Dd = spec.form_diagonal
    wj = wts[0] if cj == 0 else wts[1]
    target = Dd[0] if cj == 0 else Dd[1]
    # last row always has row class 1; look it up by relative norm
    table: dict = {}
    for item in cands[1, cj]:
        table.setdefault(_rel_norm(item[0]), []).append(item)
    cols = []
    exhausted = False
    chosen: list = []

    def rec(i: int, partial: float, rest: FieldElement) -> bool:
        nonlocal exhausted
        if not budget.tick():
            exhausted = True
            return False
        if i == n - 1:
            for item in table.get(rest * SQRT2.inverse(), ()):
                if partial + wts[i] * item[1] <= wj + 1e-9:
                    cols.append(tuple(chosen) + (item,))
            return True
        for item in cands[0 if i == 0 else 1, cj]:
            s = partial + wts[i] * item[1]
            if s > wj + 1e-9:
                break
            chosen.append(item)
            ok = rec(i + 1, s, rest - Dd[i] * _rel_norm(item[0]))
            chosen.pop()
            if not ok:
                return False
        return True

    rec(0, 0.0, target)
    return cols, exhausted


def _pair(a, b, D) -> FieldElement:
    acc = ZERO
    for x, y, d in zip(a, b, D):
        if x[0] and y[0]:
            acc = acc + galois_tau(x[0]) * d * y[0]
    return acc


def enumerate_members(
    spec: LatticeSpec,
    coeff_box: int,
    distance_cap: float,
    node_budget: int = DEFAULT_NODE_BUDGET,
    strict: bool = False,
) -> EnumerationResult:
    """All members with coordinates in [-B, B] and distance < D.

    Columns are built entry by entry, pruned by the complex-embedding bound
    and closed by a norm-table lookup on the last entry; full columns are
    then combined when pairwise orthogonal for the form.  When the node
    budget runs out the partial list is returned with ``budget_exhausted``
    set, or SizeError is raised if ``strict``.
    """
    n, B, Dcap = spec.n, int(coeff_box), float(distance_cap)
    if B < 0 or B > MAX_BOX:
        raise SizeError(f"coefficient box must lie in [0, {MAX_BOX}], got {B}")
    if n > MAX_ENUM_N:
        raise SizeError(f"enumeration supports n <= {MAX_ENUM_N}")
    if Dcap <= 0:
        return EnumerationResult([], False, 0, {"n": n, "B": B, "D": Dcap})
    budget = _Budget(node_budget)
    cands = _entry_candidates(B, Dcap)
    first, ex0 = _columns(spec, 0, cands, budget)
    other, ex1 = ([], ex0) if ex0 else _columns(spec, 1, cands, budget)
    exhausted = ex0 or ex1
    Dd = spec.form_diagonal
    members = []

    if not exhausted:
        # numeric prefilter on orthogonality under the complex embedding
        W = np.array([1.0] + [_S] * (n - 1))

        def cvec(col):
            return np.array([it[2] for it in col])

        F = np.array([cvec(c) for c in first]) if first else np.zeros((0, n))
        O = np.array([cvec(c) for c in other]) if other else np.zeros((0, n))
        G_fo = (F.conj() * W) @ O.T if len(first) and len(other) else np.zeros((len(first), len(other)))
        G_oo = (O.conj() * W) @ O.T if len(other) else np.zeros((0, 0))
        near_fo = np.abs(G_fo) < 1e-6
        near_oo = np.abs(G_oo) < 1e-6

        def assemble(cols_idx: list[int], f_idx: int, allowed: np.ndarray) -> bool:
            if not budget.tick():
                return False
            if len(cols_idx) == n - 1:
                cols = [first[f_idx]] + [other[k] for k in cols_idx]
                g = FieldMatrix([[cols[j][i][0] for j in range(n)] for i in range(n)])
                if det(g) != ONE:
                    return True
                M = np.array([[cols[j][i][3] for j in range(n)] for i in range(n)])
                d = _fast_distance(M)
                if abs(d - Dcap) < 1e-7:
                    d = float(symmetric_space_distance(g))
                if d < Dcap:
                    members.append(LatticeElement(g, spec, certified=True))
                return True
            for k in np.nonzero(allowed)[0]:
                if _pair(first[f_idx], other[k], Dd):
                    continue
                if any(_pair(other[p], other[k], Dd) for p in cols_idx):
                    continue
                nxt = allowed & near_oo[k]
                if not assemble(cols_idx + [int(k)], f_idx, nxt):
                    return False
            return True

        for f_idx in range(len(first)):
            if not assemble([], f_idx, near_fo[f_idx].copy()):
                exhausted = True
                break

    if exhausted and strict:
        raise SizeError(f"node budget {node_budget} exhausted")
    members.sort(key=lambda e: tuple(x.coords for x in e.g.flatten()))
    return EnumerationResult(members, exhausted, budget.used, {"n": n, "B": B, "D": Dcap})
