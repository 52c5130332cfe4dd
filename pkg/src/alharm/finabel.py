"""Finite abelian groups, their duals, Haar lines and the image maps.

Groups are kept in invariant-factor form ``Z/d1 x ... x Z/dk`` with
``d1 | d2 | ... | dk``.  A complex function on such a group is a numpy
tensor whose shape is the tuple of moduli, so the trivial group carries
0-dimensional arrays.  Characters are indexed by the same residues and
evaluate as ``exp(2 pi i sum(chi_i x_i / d_i))``.

All integer linear algebra (Smith and Hermite forms, kernels, quotients)
uses Python integers, so it is exact.  Complex arithmetic is double
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# ---------------------------------------------------------------------------
# integer matrices


def _as_rows(M) -> list[list[int]]:
    return [[int(v) for v in row] for row in M]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _matmul(A, B):
    if not A or not B:
        n = len(B[0]) if B else 0
        return [[0] * n for _ in A]
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def smith_normal_form(M):
    """Return ``(U, S, V)`` with ``U @ M @ V == S``.

    ``S`` is diagonal (rectangular allowed) with nonnegative entries where
    each nonzero diagonal entry divides the next; ``U`` and ``V`` are
    unimodular.  Entries are Python ints, returned as object arrays.
    """
    S = _as_rows(M)
    m = len(S)
    n = len(S[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        S[dst] = [a + c * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in S:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if S[i][t]:
                    q = S[i][t] // S[t][t]
                    add_row(i, t, -q)
                    if S[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if S[t][j]:
                    q = S[t][j] // S[t][t]
                    add_col(j, t, -q)
                    if S[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # pivot must divide the rest of the block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % S[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-v for v in S[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return (np.array(U, dtype=object).reshape(m, m),
            np.array(S, dtype=object).reshape(m, n),
            np.array(V, dtype=object).reshape(n, n))


def hermite_rows(rows, ncols: int) -> list[list[int]]:
    """Row Hermite normal form: upper triangular, positive pivots,
    entries above each pivot reduced into ``[0, pivot)``.  Zero rows dropped."""
    H = [list(map(int, r)) for r in rows]
    r = 0
    for c in range(ncols):
        while True:
            live = [i for i in range(r, len(H)) if H[i][c]]
            if not live:
                break
            p = min(live, key=lambda i: abs(H[i][c]))
            H[r], H[p] = H[p], H[r]
            changed = False
            for i in range(r + 1, len(H)):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    changed = changed or H[i][c] != 0
            if not changed:
                break
        if r < len(H) and H[r][c]:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
            r += 1
    return H[:r]


def _inverse_unimodular(U) -> list[list[int]]:
    n = len(U)
    A = [list(map(int, row)) + _identity(n)[i] for i, row in enumerate(U)]
    H = hermite_rows(A, 2 * n)
    # unimodular => left block is the identity after reduction
    for i in range(n):
        if H[i][i] != 1:
            raise ValueError("matrix is not unimodular")
    return [row[n:] for row in H]


def integer_kernel(M, ncols: int | None = None) -> list[list[int]]:
    """Basis of ``{x in Z^n : M x = 0}`` as a list of column vectors."""
    rows = _as_rows(M)
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if not rows:
        return _identity(n)
    _, S, V = smith_normal_form(rows)
    rank = sum(1 for i in range(min(S.shape)) if S[i, i] != 0)
    return [[int(V[i, j]) for i in range(n)] for j in range(rank, n)]


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FinAbGroup:
    moduli: tuple[int, ...] = ()

    def __post_init__(self):
        mods = tuple(int(d) for d in self.moduli)
        object.__setattr__(self, "moduli", mods)
        for d in mods:
            if d < 2:
                raise ValueError(f"modulus {d} < 2")
        for a, b in zip(mods, mods[1:]):
            if b % a:
                raise ValueError(f"moduli {mods} are not an invariant-factor chain")

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.moduli

    def dual(self) -> "FinAbGroup":
        return self

    def elements(self) -> np.ndarray:
        """All residue vectors, shape (order, rank), in C order."""
        if not self.moduli:
            return np.zeros((1, 0), dtype=np.int64)
        grid = np.indices(self.moduli).reshape(self.rank, -1)
        return grid.T.astype(np.int64)

    def element(self, residues) -> "GroupElement":
        return GroupElement(self, tuple(residues))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def flat_index(self, X: np.ndarray) -> np.ndarray:
        """Flat C-order index of residue rows ``X`` (reduced first)."""
        if not self.moduli:
            return np.zeros(len(X), dtype=np.int64)
        X = np.mod(X, np.array(self.moduli, dtype=np.int64))
        return np.ravel_multi_index(X.T, self.moduli)

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli)}

    @classmethod
    def from_json(cls, d: dict) -> "FinAbGroup":
        return cls(tuple(d["moduli"]))


@dataclass(frozen=True)
class GroupElement:
    parent: FinAbGroup
    residues: tuple[int, ...]

    def __post_init__(self):
        if len(self.residues) != self.parent.rank:
            raise ValueError("residue vector length does not match the group")
        red = tuple(int(r) % d for r, d in zip(self.residues, self.parent.moduli))
        object.__setattr__(self, "residues", red)

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if other.parent != self.parent:
            raise ValueError("elements of different groups")
        return GroupElement(self.parent, tuple(a + b for a, b in zip(self.residues, other.residues)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.parent, tuple(-a for a in self.residues))


def dual_group(G: FinAbGroup) -> FinAbGroup:
    return G.dual()


def eval_char(chi: GroupElement, x: GroupElement) -> complex:
    """Value of the character ``chi`` of ``dual(G)`` at ``x`` in ``G``."""
    if chi.parent != x.parent.dual():
        raise ValueError("character and point belong to mismatched groups")
    phase = sum(c * v / d for c, v, d in zip(chi.residues, x.residues, x.parent.moduli))
    return complex(np.exp(2j * np.pi * (phase % 1.0)))


def present(relations, k: int):
    """Normalize the presented group ``Z^k / (column span of relations)``.

    Returns ``(G, to_G, from_G)`` where ``to_G`` (rank(G) x k) maps
    presentation coordinates to invariant residues and ``from_G``
    (k x rank(G)) maps back to a representative.
    """
    R = _as_rows(relations) if len(relations) else [[] for _ in range(k)]
    if k == 0:
        return FinAbGroup(()), np.zeros((0, 0), dtype=object), np.zeros((0, 0), dtype=object)
    ncols = len(R[0])
    if ncols == 0:
        raise ValueError("presentation is not of finite index")
    U, S, V = smith_normal_form(R)
    Uinv = _inverse_unimodular(U.tolist())
    diag = [int(S[i, i]) if i < ncols else 0 for i in range(k)]
    if any(s == 0 for s in diag):
        raise ValueError("presentation is not of finite index")
    keep = [i for i, s in enumerate(diag) if s > 1]
    G = FinAbGroup(tuple(diag[i] for i in keep))
    to_G = np.array([[int(U[i, j]) % diag[i] for j in range(k)] for i in keep],
                    dtype=object).reshape(len(keep), k)
    from_G = np.array([[Uinv[r][i] for i in keep] for r in range(k)],
                      dtype=object).reshape(k, len(keep))
    return G, to_G, from_G


# ---------------------------------------------------------------------------
# subgroups and homomorphisms


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of ``parent`` stored by the Hermite basis of its lattice.

    The lattice is the preimage of the subgroup in ``Z^k``; it contains
    ``diag(moduli) Z^k`` and therefore has full rank.  Its row Hermite
    basis is unique, which makes equality structural.
    """

    parent: FinAbGroup
    basis: tuple[tuple[int, ...], ...] = field(default=())

    @classmethod
    def generated_by(cls, G: FinAbGroup, gens) -> "Subgroup":
        k = G.rank
        rows = [list(map(int, g)) for g in gens]
        for g in rows:
            if len(g) != k:
                raise ValueError("generator length does not match the group")
        rows += [[G.moduli[i] if j == i else 0 for j in range(k)] for i in range(k)]
        H = hermite_rows(rows, k)
        return cls(G, tuple(tuple(r) for r in H))

    @classmethod
    def whole(cls, G: FinAbGroup) -> "Subgroup":
        return cls.generated_by(G, [[int(i == j) for j in range(G.rank)] for i in range(G.rank)])

    @classmethod
    def zero(cls, G: FinAbGroup) -> "Subgroup":
        return cls.generated_by(G, [])

    def __post_init__(self):
        k = self.parent.rank
        if len(self.basis) != k:
            if self.basis == () and k == 0:
                return
            raise ValueError("subgroup basis is not a full-rank Hermite basis")

    def is_canonical(self) -> bool:
        canon = Subgroup.generated_by(self.parent, self.basis)
        return canon.basis == self.basis

    @property
    def generators(self) -> list[tuple[int, ...]]:
        """Canonical generators reduced to residues (zeros dropped)."""
        out = []
        for r in self.basis:
            g = tuple(v % d for v, d in zip(r, self.parent.moduli))
            if any(g):
                out.append(g)
        return out

    @property
    def order(self) -> int:
        det = math.prod(self.basis[i][i] for i in range(self.parent.rank))
        return self.parent.order // det

    def contains(self, x) -> bool:
        x = list(map(int, x))
        k = self.parent.rank
        for i in range(k):
            piv = self.basis[i][i]
            if x[i] % piv:
                return False
            c = x[i] // piv
            x = [a - c * b for a, b in zip(x, self.basis[i])]
        return True

    def __le__(self, other: "Subgroup") -> bool:
        return self.parent == other.parent and all(other.contains(r) for r in self.basis)

    def __add__(self, other: "Subgroup") -> "Subgroup":
        return Subgroup.generated_by(self.parent, list(self.basis) + list(other.basis))

    def mask(self) -> np.ndarray:
        """Boolean indicator tensor of the subgroup on the parent's shape."""
        G = self.parent
        inc, H = self.as_group()
        m = np.zeros(G.order, dtype=bool)
        m[inc.index_map()] = True
        return m.reshape(G.shape)

    def as_group(self):
        """Return ``(injection, H)``: an invariant-form group isomorphic to
        the subgroup together with the injective hom into the parent."""
        G = self.parent
        k = G.rank
        # columns of B span the lattice; C = B^{-1} diag(d)
        B = [[self.basis[j][i] for j in range(k)] for i in range(k)]
        C = _solve_lower_integer(B, [[G.moduli[i] if r == i else 0 for i in range(k)] for r in range(k)])
        H, _, from_H = present(C, k)
        inj = _matmul(B, from_H.tolist()) if k else []
        A = np.array([[int(v) % G.moduli[i] for v in row] for i, row in enumerate(inj)],
                     dtype=object).reshape(k, H.rank)
        return GroupHom(H, G, A), H

    def annihilator(self) -> "Subgroup":
        """Characters of the parent that are trivial on the subgroup."""
        inj, _ = self.as_group()
        return inj.dual().kernel()

    def to_json(self) -> dict:
        return {"group": self.parent.to_json(), "basis": [list(r) for r in self.basis]}


def _solve_lower_integer(B, R):
    """Solve ``B X = R`` exactly for a lower-triangular integer ``B``."""
    k = len(B)
    ncols = len(R[0]) if R else 0
    X = [[0] * ncols for _ in range(k)]
    for c in range(ncols):
        for i in range(k):
            s = R[i][c] - sum(B[i][j] * X[j][c] for j in range(i))
            if s % B[i][i]:
                raise ValueError("lattice does not contain the relation lattice")
            X[i][c] = s // B[i][i]
    return X


@dataclass(frozen=True, eq=False)
class GroupHom:
    """Homomorphism ``source -> target`` given by an integer matrix on residues."""

    source: FinAbGroup
    target: FinAbGroup
    matrix: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=object).reshape(self.target.rank, self.source.rank)
        A = np.array([[int(A[i, j]) % self.target.moduli[i] for j in range(self.source.rank)]
                      for i in range(self.target.rank)], dtype=object).reshape(A.shape)
        object.__setattr__(self, "matrix", A)
        for j, d in enumerate(self.source.moduli):
            for i, e in enumerate(self.target.moduli):
                if (d * A[i, j]) % e:
                    raise ValueError("matrix does not define a homomorphism")

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and self.source == other.source
                and self.target == other.target
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.matrix.ravel().tolist())))

    def __call__(self, x: GroupElement) -> GroupElement:
        if x.parent != self.source:
            raise ValueError("element is not in the source group")
        y = [sum(int(self.matrix[i, j]) * x.residues[j] for j in range(self.source.rank))
             for i in range(self.target.rank)]
        return GroupElement(self.target, tuple(y))

    def __matmul__(self, other: "GroupHom") -> "GroupHom":
        # self o other
        if other.target != self.source:
            raise ValueError("homomorphisms are not composable")
        return GroupHom(other.source, self.target, self.matrix.dot(other.matrix))

    @classmethod
    def identity(cls, G: FinAbGroup) -> "GroupHom":
        return cls(G, G, np.array(_identity(G.rank), dtype=object).reshape(G.rank, G.rank))

    @classmethod
    def zero(cls, G: FinAbGroup, H: FinAbGroup) -> "GroupHom":
        return cls(G, H, np.zeros((H.rank, G.rank), dtype=object))

    @cached_property
    def _index_map(self) -> np.ndarray:
        X = self.source.elements()
        A = self.matrix.astype(np.int64)
        Y = X @ A.T if self.target.rank else np.zeros((len(X), 0), dtype=np.int64)
        return self.target.flat_index(Y)

    def index_map(self) -> np.ndarray:
        """Flat target index of every flat source index."""
        return self._index_map

    def kernel(self) -> Subgroup:
        k, m = self.source.rank, self.target.rank
        if m == 0:
            return Subgroup.whole(self.source)
        M = [[int(self.matrix[i, j]) for j in range(k)]
             + [self.target.moduli[i] if r == i else 0 for r in range(m)] for i in range(m)]
        ker = integer_kernel(M, k + m)
        return Subgroup.generated_by(self.source, [v[:k] for v in ker])

    def image(self) -> Subgroup:
        cols = [[int(self.matrix[i, j]) for i in range(self.target.rank)]
                for j in range(self.source.rank)]
        return Subgroup.generated_by(self.target, cols)

    def is_injective(self) -> bool:
        return self.kernel().order == 1

    def is_surjective(self) -> bool:
        return self.image().order == self.target.order

    def dual(self) -> "GroupHom":
        """Pullback of characters: ``psi -> psi o self``."""
        d, e = self.source.moduli, self.target.moduli
        A = self.matrix
        D = [[int(A[i, j]) * d[j] // e[i] for i in range(len(e))] for j in range(len(d))]
        return GroupHom(self.target.dual(), self.source.dual(),
                        np.array(D, dtype=object).reshape(len(d), len(e)))

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(),
                "matrix": [[int(v) for v in row] for row in self.matrix]}


def intersect(A: Subgroup, B: Subgroup) -> Subgroup:
    """``A & B`` via annihilators: ``(A^perp + B^perp)^perp``."""
    if A.parent != B.parent:
        raise ValueError("subgroups of different groups")
    return (A.annihilator() + B.annihilator()).annihilator()


def image_of(h: GroupHom, S: Subgroup) -> Subgroup:
    if S.parent != h.source:
        raise ValueError("subgroup is not in the source of the map")
    inj, _ = S.as_group()
    return (h @ inj).image()


def preimage(h: GroupHom, S: Subgroup) -> Subgroup:
    if S.parent != h.target:
        raise ValueError("subgroup is not in the target of the map")
    _, proj = quotient(h.target, S)
    return (proj @ h).kernel()


def quotient(G: FinAbGroup, H: Subgroup):
    """Return ``(Q, proj)`` with ``proj: G -> Q`` surjective and kernel ``H``."""
    if H.parent != G:
        raise ValueError("subgroup of a different group")
    if not H.is_canonical():
        raise ValueError("subgroup is not in canonical form")
    k = G.rank
    cols = [[H.basis[j][i] for j in range(k)] for i in range(k)]
    Q, to_Q, _ = present(cols, k)
    return Q, GroupHom(G, Q, to_Q)


def direct_product(*groups: FinAbGroup):
    """Invariant-form product with its injections and projections."""
    mods = [d for G in groups for d in G.moduli]
    k = len(mods)
    rel = [[mods[i] if j == i else 0 for j in range(k)] for i in range(k)]
    P, to_P, from_P = present(rel, k) if k else (FinAbGroup(()), np.zeros((0, 0), dtype=object),
                                                  np.zeros((0, 0), dtype=object))
    incs, projs = [], []
    off = 0
    for G in groups:
        r = G.rank
        incs.append(GroupHom(G, P, to_P[:, off:off + r] if P.rank else np.zeros((0, r), dtype=object)))
        projs.append(GroupHom(P, G, from_P[off:off + r, :] if r else np.zeros((0, P.rank), dtype=object)))
        off += r
    return P, incs, projs


def fibered_product(f: GroupHom, g: GroupHom):
    """Pullback of ``f: A -> C`` and ``g: B -> C``.

    Returns ``(X, pA, pB)`` with ``f pA == g pB``.
    """
    if f.target != g.target:
        raise ValueError("maps have different targets")
    P, (iA, iB), (qA, qB) = direct_product(f.source, g.source)
    diff = GroupHom(P, f.target, (f @ qA).matrix - (g @ qB).matrix)
    inj, X = diff.kernel().as_group()
    return X, qA @ inj, qB @ inj


def pushout(f: GroupHom, g: GroupHom):
    """Pushout of ``f: C -> A`` and ``g: C -> B``.

    Returns ``(Y, jA, jB)`` with ``jA f == jB g``.
    """
    if f.source != g.source:
        raise ValueError("maps have different sources")
    P, (iA, iB), _ = direct_product(f.target, g.target)
    diff = GroupHom(f.source, P, (iA @ f).matrix - (iB @ g).matrix)
    Y, proj = quotient(P, diff.image())
    return Y, proj @ iA, proj @ iB


# ---------------------------------------------------------------------------
# admissible triples


@dataclass(frozen=True)
class AdmissibleTripleC0:
    """Short exact sequence ``0 -> G1 -alpha-> G2 -beta-> G3 -> 0``."""

    alpha: GroupHom
    beta: GroupHom

    def __post_init__(self):
        a, b = self.alpha, self.beta
        if a.target != b.source:
            raise ValueError("alpha and beta are not composable")
        if not a.is_injective():
            raise ValueError("alpha is not injective")
        if not b.is_surjective():
            raise ValueError("beta is not surjective")
        if a.image() != b.kernel():
            raise ValueError("image(alpha) != kernel(beta)")

    @property
    def G1(self) -> FinAbGroup:
        return self.alpha.source

    @property
    def G2(self) -> FinAbGroup:
        return self.alpha.target

    @property
    def G3(self) -> FinAbGroup:
        return self.beta.target

    def dual(self) -> "AdmissibleTripleC0":
        return AdmissibleTripleC0(self.beta.dual(), self.alpha.dual())

    @classmethod
    def from_subgroup(cls, G: FinAbGroup, H: Subgroup) -> "AdmissibleTripleC0":
        inj, _ = H.as_group()
        _, proj = quotient(G, H)
        return cls(inj, proj)

    def is_exact_by_enumeration(self) -> bool:
        """Brute-force exactness check over all elements."""
        img = set(self.alpha.index_map().tolist())
        ker = set(np.flatnonzero(self.beta.index_map() == 0).tolist())
        inj = len(img) == self.G1.order
        surj = len(set(self.beta.index_map().tolist())) == self.G3.order
        return inj and surj and img == ker


# ---------------------------------------------------------------------------
# functions, distributions, measures


@dataclass(frozen=True, eq=False)
class FunctionC0:
    group: FinAbGroup
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(self.group.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", v)

    def reflect(self) -> "FunctionC0":
        return type(self)(self.group, reflect(self.values))

    def to_json(self) -> dict:
        flat = self.values.ravel()
        return {"group": self.group.to_json(), "re": flat.real.tolist(), "im": flat.imag.tolist()}

    @classmethod
    def from_json(cls, d: dict):
        G = FinAbGroup.from_json(d["group"])
        return cls(G, np.array(d["re"]) + 1j * np.array(d["im"]))


class DistributionC0(FunctionC0):
    """Distribution given by a kernel: ``<H, f> = sum_x H(x) f(x)``."""

    def pair(self, f: FunctionC0) -> complex:
        if f.group != self.group:
            raise ValueError("pairing across different groups")
        return complex(np.sum(self.values * f.values))


@dataclass(frozen=True)
class MeasureC0:
    """``scalar`` times counting measure."""

    group: FinAbGroup
    scalar: complex = 1.0

    def inverse(self) -> "MeasureC0":
        """Dual measure on the character group: ``mu (x) mu^-1 = 1``."""
        if self.scalar == 0:
            raise ValueError("zero measure has no inverse")
        return MeasureC0(self.group.dual(), 1.0 / (self.group.order * self.scalar))

    def as_distribution(self) -> DistributionC0:
        return DistributionC0(self.group, np.full(self.group.shape, self.scalar, dtype=complex))


def pair_dual_measures(mu: MeasureC0, nu: MeasureC0) -> complex:
    """The canonical number attached to ``mu`` on G and ``nu`` on its dual."""
    if nu.group != mu.group.dual():
        raise ValueError("measures are not on dual groups")
    return mu.scalar * nu.scalar * mu.group.order


def reflect(t: np.ndarray) -> np.ndarray:
    """``x -> -x`` on a residue tensor."""
    out = t
    for ax in range(t.ndim):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def _dft(t: np.ndarray) -> np.ndarray:
    return np.fft.fftn(t) if t.ndim else t.astype(complex).copy()


def fourier_c0(f: FunctionC0, mu: MeasureC0) -> FunctionC0:
    """``(F_mu f)(chi) = mu-integral of f * conj(chi)``."""
    if mu.group != f.group:
        raise ValueError("measure and function live on different groups")
    return FunctionC0(f.group.dual(), mu.scalar * _dft(f.values))


def fourier_c0_dist(H: DistributionC0, nu: MeasureC0) -> DistributionC0:
    """Transpose of ``fourier_c0(., nu)``, where ``nu`` lives on ``dual(H.group)``.

    ``<F_nu f, H> == <f, fourier_c0_dist(H, nu)>`` for f on the dual group.
    """
    if nu.group != H.group.dual():
        raise ValueError("measure must live on the dual group")
    return DistributionC0(H.group.dual(), nu.scalar * _dft(H.values))


# ---------------------------------------------------------------------------
# image maps on a triple


def _fiber_sum(idx: np.ndarray, values: np.ndarray, size: int) -> np.ndarray:
    v = values.ravel()
    return (np.bincount(idx, weights=v.real, minlength=size)
            + 1j * np.bincount(idx, weights=v.imag, minlength=size))


def _check(obj, group: FinAbGroup, what: str):
    if obj.group != group:
        raise ValueError(f"{what} lives on the wrong group")


def push_along(h: GroupHom, values: np.ndarray) -> np.ndarray:
    """Sum of values over the fibers of ``h``."""
    return _fiber_sum(h.index_map(), values, h.target.order).reshape(h.target.shape)


def pull_along(h: GroupHom, values: np.ndarray) -> np.ndarray:
    return values.ravel()[h.index_map()].reshape(h.source.shape)


def extend_along(h: GroupHom, values: np.ndarray) -> np.ndarray:
    """Extension by zero along an injective ``h``."""
    out = np.zeros(h.target.order, dtype=complex)
    out[h.index_map()] = values.ravel()
    return out.reshape(h.target.shape)


def epi_pushforward(T: AdmissibleTripleC0, f: FunctionC0, mu1: MeasureC0) -> FunctionC0:
    """``beta_*(f (x) mu1)``: fiberwise mu1-integral."""
    _check(f, T.G2, "function")
    _check(mu1, T.G1, "measure")
    return FunctionC0(T.G3, mu1.scalar * push_along(T.beta, f.values))


def epi_pullback_dist(T: AdmissibleTripleC0, H: DistributionC0, mu1: MeasureC0) -> DistributionC0:
    """Transpose of ``epi_pushforward``."""
    _check(H, T.G3, "distribution")
    _check(mu1, T.G1, "measure")
    return DistributionC0(T.G2, mu1.scalar * pull_along(T.beta, H.values))


def mono_pullback(T: AdmissibleTripleC0, f: FunctionC0) -> FunctionC0:
    _check(f, T.G2, "function")
    return FunctionC0(T.G1, pull_along(T.alpha, f.values))


def mono_pushforward_dist(T: AdmissibleTripleC0, H: DistributionC0) -> DistributionC0:
    """Transpose of ``mono_pullback``."""
    _check(H, T.G1, "distribution")
    return DistributionC0(T.G2, extend_along(T.alpha, H.values))


def mono_pushforward(T: AdmissibleTripleC0, f: FunctionC0) -> FunctionC0:
    _check(f, T.G1, "function")
    return FunctionC0(T.G2, extend_along(T.alpha, f.values))


def mono_pullback_dist(T: AdmissibleTripleC0, H: DistributionC0) -> DistributionC0:
    """Transpose of ``mono_pushforward``: restriction of the kernel."""
    _check(H, T.G2, "distribution")
    return DistributionC0(T.G1, pull_along(T.alpha, H.values))


def epi_pullback(T: AdmissibleTripleC0, f: FunctionC0) -> FunctionC0:
    _check(f, T.G3, "function")
    return FunctionC0(T.G2, pull_along(T.beta, f.values))


def epi_pushforward_dist(T: AdmissibleTripleC0, H: DistributionC0) -> DistributionC0:
    """Transpose of ``epi_pullback``: fiber sums of the kernel."""
    _check(H, T.G2, "distribution")
    return DistributionC0(T.G3, push_along(T.beta, H.values))


def poisson_c0_check(T: AdmissibleTripleC0, mu1: MeasureC0, mu3: MeasureC0) -> dict:
    """Compare the transform of ``alpha_*(mu1)`` with ``beta^_*(mu3)``.

    ``mu1`` lives on G1 and ``mu3`` on ``dual(G3)``; the transform uses the
    measure ``mu1^-1 (x) mu3`` on ``dual(G2)``.
    """
    if mu1.scalar == 0:
        raise ValueError("mu1 must be nonzero")
    _check(mu1, T.G1, "mu1")
    _check(mu3, T.G3.dual(), "mu3")
    D = T.dual()
    lhs_measure = MeasureC0(T.G2.dual(), mu1.inverse().scalar * mu3.scalar)
    delta_E1 = mono_pushforward_dist(T, mu1.as_distribution())
    lhs = fourier_c0_dist(delta_E1, lhs_measure)
    rhs = mono_pushforward_dist(D, mu3.as_distribution())
    dev = float(np.max(np.abs(lhs.values - rhs.values))) if lhs.values.size else 0.0
    return {"lhs": lhs, "rhs": rhs, "max_deviation": dev,
            "note": "characters exp(2 pi i sum chi_i x_i / d_i)"}


# ---------------------------------------------------------------------------
# random instances and the identity suite


def random_group(rng: np.random.Generator, max_order: int) -> FinAbGroup:
    """Random invariant-factor group of order at most ``max_order``."""
    mods: list[int] = []
    order = 1
    for _ in range(int(rng.integers(0, 5))):
        base = mods[-1] if mods else 1
        choices = [base * m for m in (1, 2, 3, 4, 5, 6) if base * m > 1
                   and order * base * m <= max_order]
        if not choices:
            break
        d = int(rng.choice(choices))
        mods.append(d)
        order *= d
    # the chain is built increasing from the front, so it already divides
    return FinAbGroup(tuple(mods))


def random_subgroup(rng: np.random.Generator, G: FinAbGroup) -> Subgroup:
    gens = [[int(rng.integers(0, d)) for d in G.moduli] for _ in range(int(rng.integers(0, 3)))]
    return Subgroup.generated_by(G, gens)


def random_triple(rng: np.random.Generator, max_order: int) -> AdmissibleTripleC0:
    G = random_group(rng, max_order)
    return AdmissibleTripleC0.from_subgroup(G, random_subgroup(rng, G))


def random_function(rng: np.random.Generator, G: FinAbGroup, cls=FunctionC0):
    v = rng.standard_normal(G.shape) + 1j * rng.standard_normal(G.shape)
    return cls(G, v)


def _dev(a, b) -> float:
    x, y = np.asarray(a.values), np.asarray(b.values)
    if a.group != b.group:
        raise ValueError("comparing objects on different groups")
    return float(np.max(np.abs(x - y))) if x.size else 0.0


def _triple_with_epi(beta: GroupHom) -> AdmissibleTripleC0:
    inj, _ = beta.kernel().as_group()
    return AdmissibleTripleC0(inj, beta)


def _triple_with_mono(alpha: GroupHom) -> AdmissibleTripleC0:
    _, proj = quotient(alpha.target, alpha.image())
    return AdmissibleTripleC0(alpha, proj)


def _rand_scalar(rng) -> complex:
    return complex(rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform()))


def base_change_identities(T: AdmissibleTripleC0, D: Subgroup, rng) -> dict[str, float]:
    """Cartesian-square formulas for ``E2 x_{E3} D``.

    ``D`` is a subgroup of ``T.G3``; B is the quotient ``G3 / D``.
    """
    Tg = AdmissibleTripleC0.from_subgroup(T.G3, D)          # D -> E3 -> B
    X, to_E2, to_D = fibered_product(T.beta, Tg.alpha)
    Tgb = _triple_with_epi(to_D)                             # E1 -> X -> D
    Tbg = _triple_with_mono(to_E2)                           # X -> E2 -> B
    mu = MeasureC0(T.G1, _rand_scalar(rng))
    mu_k = MeasureC0(Tgb.G1, mu.scalar)                      # same scalar on ker(to_D)
    f2 = random_function(rng, T.G2)
    f3 = random_function(rng, T.G3)
    fD = random_function(rng, Tg.G1)
    fX = random_function(rng, X)
    HD = random_function(rng, Tg.G1, DistributionC0)
    H2 = random_function(rng, T.G2, DistributionC0)
    H3 = random_function(rng, T.G3, DistributionC0)
    HX = random_function(rng, X, DistributionC0)
    out = {}
    out["base_change_sum_restrict"] = _dev(mono_pullback(Tg, epi_pushforward(T, f2, mu)),
                       epi_pushforward(Tgb, mono_pullback(Tbg, f2), mu_k))
    out["base_change_sum_restrict_dist"] = _dev(epi_pullback_dist(T, mono_pushforward_dist(Tg, HD), mu),
                       mono_pushforward_dist(Tbg, epi_pullback_dist(Tgb, HD, mu_k)))
    out["base_change_inflate_restrict"] = _dev(epi_pullback(Tgb, mono_pullback(Tg, f3)),
                       mono_pullback(Tbg, epi_pullback(T, f3)))
    out["base_change_push_extend_dist"] = _dev(epi_pushforward_dist(T, mono_pushforward_dist(Tbg, HX)),
                       mono_pushforward_dist(Tg, epi_pushforward_dist(Tgb, HX)))
    out["base_change_sum_extend"] = _dev(epi_pushforward(T, mono_pushforward(Tbg, fX), mu),
                          mono_pushforward(Tg, epi_pushforward(Tgb, fX, mu_k)))
    out["base_change_inflate_restrict_dist"] = _dev(epi_pullback_dist(Tgb, mono_pullback_dist(Tg, H3), mu_k),
                          mono_pullback_dist(Tbg, epi_pullback_dist(T, H3, mu)))
    out["base_change_inflate_extend"] = _dev(epi_pullback(T, mono_pushforward(Tg, fD)),
                         mono_pushforward(Tbg, epi_pullback(Tgb, fD)))
    out["base_change_push_restrict_dist"] = _dev(mono_pullback_dist(Tg, epi_pushforward_dist(T, H2)),
                         epi_pushforward_dist(Tgb, mono_pullback_dist(Tbg, H2)))
    return out


def composition_identities(T: AdmissibleTripleC0, rng, max_order: int) -> dict[str, float]:
    """Composition of two epimorphisms and of two monomorphisms.

    Builds ``L -> H -> E2`` by presenting ``E2`` as a quotient of a larger
    group, and ``E2 -> H' -> L'`` by embedding ``E2`` as a subgroup.
    """
    out = {}
    # epi o epi: H -> E2 -> E3
    L_sub, Hgrp = _random_cover(rng, T.G2, max_order)
    # invariant forms are unique, so H / L is literally the group E2
    Tp = AdmissibleTripleC0.from_subgroup(Hgrp, L_sub)          # L -> H -> E2
    comp = _triple_with_epi(T.beta @ Tp.beta)                     # E -> H -> E3
    nu = MeasureC0(Tp.G1, _rand_scalar(rng))
    mu = MeasureC0(T.G1, _rand_scalar(rng))
    nm = MeasureC0(comp.G1, nu.scalar * mu.scalar)
    fH = random_function(rng, Hgrp)
    G3 = random_function(rng, T.G3, DistributionC0)
    f3 = random_function(rng, T.G3)
    GH = random_function(rng, Hgrp, DistributionC0)
    out["compose_fiber_sums"] = _dev(epi_pushforward(comp, fH, nm),
                     epi_pushforward(T, epi_pushforward(Tp, fH, nu), mu))
    out["compose_fiber_sums_dist"] = _dev(epi_pullback_dist(comp, G3, nm),
                     epi_pullback_dist(Tp, epi_pullback_dist(T, G3, mu), nu))
    out["compose_inflations"] = _dev(epi_pullback(comp, f3), epi_pullback(Tp, epi_pullback(T, f3)))
    out["compose_pushforwards_dist"] = _dev(epi_pushforward_dist(comp, GH),
                         epi_pushforward_dist(T, epi_pushforward_dist(Tp, GH)))
    # mono o mono: E1 -> E2 -> H'
    Tq = _random_envelope(rng, T.G2, max_order)                 # E2 -> H' -> L'
    compm = _triple_with_mono(Tq.alpha @ T.alpha)               # E1 -> H' -> E3 u H'
    fHp = random_function(rng, Tq.G2)
    G1 = random_function(rng, T.G1, DistributionC0)
    f1 = random_function(rng, T.G1)
    GHp = random_function(rng, Tq.G2, DistributionC0)
    out["compose_restrictions"] = _dev(mono_pullback(compm, fHp), mono_pullback(T, mono_pullback(Tq, fHp)))
    out["compose_extensions_dist"] = _dev(mono_pushforward_dist(compm, G1),
                      mono_pushforward_dist(Tq, mono_pushforward_dist(T, G1)))
    out["compose_extensions"] = _dev(mono_pushforward(compm, f1),
                         mono_pushforward(Tq, mono_pushforward(T, f1)))
    out["compose_restrictions_dist"] = _dev(mono_pullback_dist(compm, GHp),
                         mono_pullback_dist(T, mono_pullback_dist(Tq, GHp)))
    return out


def _random_cover(rng, E: FinAbGroup, max_order: int):
    """A group ``H`` with a subgroup ``L`` such that ``H / L`` is ``E``."""
    extra = random_group(rng, max(1, max_order // max(E.order, 1)))
    P, (iE, iX), (pE, pX) = direct_product(E, extra)
    # twist the kernel so the extension is not a coordinate projection
    gens = [[int(v) for v in iX.matrix[:, j]] for j in range(extra.rank)]
    if gens and E.rank:
        shear = (iE @ GroupHom(extra, E, np.array(
            [[int(rng.integers(0, 2)) * (E.moduli[i] // math.gcd(E.moduli[i], extra.moduli[j]))
              for j in range(extra.rank)] for i in range(E.rank)], dtype=object)))
        gens = [[int(a) + int(b) for a, b in zip(g, shear.matrix[:, j])] for j, g in enumerate(gens)]
    return Subgroup.generated_by(P, gens), P


def _random_envelope(rng, E: FinAbGroup, max_order: int) -> AdmissibleTripleC0:
    """A triple ``E -> H' -> L'`` with ``E`` embedded as a subgroup."""
    extra = random_group(rng, max(1, max_order // max(E.order, 1)))
    P, (iE, iX), _ = direct_product(E, extra)
    if E.rank and extra.rank:
        # graph of a random hom E -> extra, still a copy of E
        phi = np.array([[int(rng.integers(0, 2)) * (extra.moduli[i] // math.gcd(extra.moduli[i], E.moduli[j]))
                         for j in range(E.rank)] for i in range(extra.rank)], dtype=object)
        emb = GroupHom(E, P, (iE.matrix + (iX @ GroupHom(E, extra, phi)).matrix))
    else:
        emb = iE
    return _triple_with_mono(emb)


def fourier_image_identities(T: AdmissibleTripleC0, rng) -> dict[str, float]:
    """Transform/image commutation squares on a triple and its dual."""
    D = T.dual()                       # dual(G3) -> dual(G2) -> dual(G1)
    out = {}
    m1, m3 = _rand_scalar(rng), _rand_scalar(rng)
    mu1 = MeasureC0(T.G1, m1)
    mu2 = MeasureC0(T.G2, m1 * m3)
    mu3 = MeasureC0(T.G3, m3)
    f2 = random_function(rng, T.G2)
    f3 = random_function(rng, T.G3)
    f1 = random_function(rng, T.G1)
    H3 = random_function(rng, T.G3, DistributionC0)
    H2 = random_function(rng, T.G2, DistributionC0)
    H1 = random_function(rng, T.G1, DistributionC0)

    # push along beta, then transform  vs  transform, then restrict
    out["fourier_fiber_sum"] = _dev(fourier_c0(epi_pushforward(T, f2, mu1), mu3),
                      mono_pullback(D, fourier_c0(f2, mu2)))
    # restrict, then transform  vs  transform, then fiber-integrate
    out["fourier_restrict"] = _dev(fourier_c0(mono_pullback(T, f2), mu1),
                      epi_pushforward(D, fourier_c0(f2, mu2), mu3.inverse()))
    # distributions, pull back along beta
    nu3 = MeasureC0(T.G3.dual(), _rand_scalar(rng))
    lhs_m = MeasureC0(T.G2.dual(), nu3.scalar * mu1.inverse().scalar)
    out["fourier_inflate_dist"] = _dev(fourier_c0_dist(epi_pullback_dist(T, H3, mu1), lhs_m),
                      mono_pushforward_dist(D, fourier_c0_dist(H3, nu3)))
    # distributions, extend along alpha
    out["fourier_extend_dist"] = _dev(fourier_c0_dist(mono_pushforward_dist(T, H1), mu2.inverse()),
                      epi_pullback_dist(D, fourier_c0_dist(H1, mu1.inverse()), mu3.inverse()))
    # inflate along beta with the unit-mass measure on G1
    one_E1 = 1.0 / T.G1.order
    out["fourier_inflate"] = _dev(fourier_c0(epi_pullback(T, f3), MeasureC0(T.G2, m3 * one_E1)),
                       mono_pushforward(D, fourier_c0(f3, mu3)))
    # its transpose
    b = _rand_scalar(rng)
    nu3d = MeasureC0(T.G3.dual(), _rand_scalar(rng))
    out["fourier_push_dist"] = _dev(_scaled(fourier_c0_dist(epi_pushforward_dist(T, H2), nu3d), b),
                       mono_pullback_dist(D, fourier_c0_dist(H2, MeasureC0(T.G2.dual(), nu3d.scalar * b))))
    # extend along alpha with the counting measure on G3
    out["fourier_extend"] = _dev(fourier_c0(mono_pushforward(T, f1), MeasureC0(T.G2, m1)),
                       epi_pullback(D, fourier_c0(f1, mu1)))
    # its transpose
    nu1 = MeasureC0(T.G1.dual(), _rand_scalar(rng))
    out["fourier_restrict_dist"] = _dev(_scaled(fourier_c0_dist(mono_pullback_dist(T, H2), nu1), b * T.G3.order),
                       epi_pushforward_dist(D, fourier_c0_dist(H2, MeasureC0(T.G2.dual(), nu1.scalar * b))))
    return out


def _scaled(x, c):
    return type(x)(x.group, x.values * c)


def c0_identity_suite(rng: np.random.Generator, max_order: int = 1024) -> dict[str, float]:
    """All sixteen formulas on one random configuration; returns deviations."""
    T = random_triple(rng, max_order)
    out = base_change_identities(T, random_subgroup(rng, T.G3), rng)
    out.update(composition_identities(T, rng, max_order))
    out.update(fourier_image_identities(T, rng))
    return out
