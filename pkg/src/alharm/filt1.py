"""Window-truncated one-dimensional filtered objects.

A finite-flavor object is stored by its window ``[lo, hi]``: the ambient
group ``W = F(hi)/F(lo)`` and the chain ``S_lo = 0 <= ... <= S_hi = W`` of
images ``S_i = F(i)/F(lo)``.  What happens beyond the window is recorded by
two tags: ``"trivial"`` means the chain is stationary there (``F(i) = 0``
below, ``F(i) = V`` above), ``"finite-stable"`` means it keeps moving by
finite steps.

Laurent-series windows carry coordinate labels (the exponents of ``t``).
Duality then uses the residue pairing ``x_e y_{-e-1}``, so the dual of a
labelled object is again written in exponent coordinates and a symmetric
window of ``F_q((t))`` is literally self-dual.

The archimedean flavor only keeps the consecutive quotients as
:class:`~alharm.archimed.C0arObject` descriptors; it is enough for the
compact/discrete predicates and for duality.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .archimed import C0arObject
from .finabel import (AdmissibleTripleC0, FinAbGroup, GroupHom, Subgroup,
                      direct_product, image_of, intersect, preimage, quotient)

TAGS = ("trivial", "finite-stable")


def _reverse_coords(S: Subgroup) -> Subgroup:
    return Subgroup.generated_by(S.parent, [g[::-1] for g in S.generators])


def _check_tag(tag: str):
    if tag not in TAGS:
        raise ValueError(f"unknown tail tag {tag!r}")


@dataclass(frozen=True)
class FilteredObject1:
    """Finite-flavor C1 object on the window ``[lo, lo + len(levels) - 1]``."""

    ambient: FinAbGroup
    lo: int
    levels: tuple[Subgroup, ...]
    tail_below: str = "finite-stable"
    tail_above: str = "finite-stable"
    o_ref: int | None = None
    labels: tuple[int, ...] | None = None

    flavor = "fin"

    def __post_init__(self):
        levels = tuple(self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("empty window")
        if self.o_ref is None:
            object.__setattr__(self, "o_ref", min(max(0, self.lo), self.hi))
        _check_tag(self.tail_below)
        _check_tag(self.tail_above)
        W = self.ambient
        for S in levels:
            if S.parent != W:
                raise ValueError("level is not a subgroup of the ambient group")
            if not S.is_canonical():
                raise ValueError("level is not in canonical form")
        if levels[0].order != 1 or levels[-1].order != W.order:
            raise ValueError("window must run from 0 to the ambient group")
        for a, b in zip(levels, levels[1:]):
            if not a <= b:
                raise ValueError("levels are not nested")
        if not self.lo <= self.o_ref <= self.hi:
            raise ValueError("reference index outside the window")
        if self.labels is not None:
            labels = tuple(int(e) for e in self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != W.rank or len(set(W.moduli)) > 1:
                raise ValueError("labels need one exponent per coordinate of a homocyclic group")
            if list(labels) != sorted(set(labels)):
                raise ValueError("labels must increase strictly")

    @property
    def hi(self) -> int:
        return self.lo + len(self.levels) - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.lo, self.hi

    def level(self, i: int) -> Subgroup:
        """``F(i)/F(lo)``; indices past the window clamp to its ends."""
        return self.levels[min(max(i, self.lo), self.hi) - self.lo]

    def order(self, i: int) -> int:
        return self.level(i).order

    @cached_property
    def _windows(self) -> dict:
        return {}

    def window_data(self, a: int, b: int):
        """``(Q, p_a, inj)`` for the window quotient ``Q = S_b / S_a``.

        ``p_a: W -> W/S_a`` is the projection and ``inj: Q -> W/S_a`` the
        inclusion of ``p_a(S_b)``.
        """
        if not self.lo <= a <= b <= self.hi:
            raise ValueError(f"window [{a}, {b}] not inside [{self.lo}, {self.hi}]")
        key = (a, b)
        if key not in self._windows:
            _, p_a = quotient(self.ambient, self.level(a))
            inj, Q = image_of(p_a, self.level(b)).as_group()
            self._windows[key] = (Q, p_a, inj)
        return self._windows[key]

    def to_json(self) -> dict:
        return {"flavor": "fin", "ambient": self.ambient.to_json(), "lo": self.lo,
                "levels": [[list(r) for r in S.basis] for S in self.levels],
                "tail_below": self.tail_below, "tail_above": self.tail_above,
                "o_ref": self.o_ref, "labels": None if self.labels is None else list(self.labels)}

    @classmethod
    def from_json(cls, d: dict) -> "FilteredObject1":
        W = FinAbGroup.from_json(d["ambient"])
        levels = tuple(Subgroup(W, tuple(tuple(r) for r in b)) for b in d["levels"])
        labels = d.get("labels")
        return cls(W, d["lo"], levels, d["tail_below"], d["tail_above"], d["o_ref"],
                   None if labels is None else tuple(labels))


@dataclass(frozen=True)
class FilteredObjectAr1:
    """Archimedean-flavor window: ``steps[k]`` describes ``F(lo+k+1)/F(lo+k)``."""

    lo: int
    steps: tuple[C0arObject, ...]
    tail_below: str = "finite-stable"
    tail_above: str = "finite-stable"
    o_ref: int | None = None

    flavor = "ar"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.o_ref is None:
            object.__setattr__(self, "o_ref", min(max(0, self.lo), self.hi))
        _check_tag(self.tail_below)
        _check_tag(self.tail_above)
        if not self.lo <= self.o_ref <= self.hi:
            raise ValueError("reference index outside the window")

    @property
    def hi(self) -> int:
        return self.lo + len(self.steps)

    @property
    def window(self) -> tuple[int, int]:
        return self.lo, self.hi

    def to_json(self) -> dict:
        return {"flavor": "ar", "lo": self.lo,
                "steps": [{"A": list(s.A.moduli), "r": s.r, "p": s.p, "q": s.q} for s in self.steps],
                "tail_below": self.tail_below, "tail_above": self.tail_above, "o_ref": self.o_ref}


# ---------------------------------------------------------------------------
# constructors


def chain_object(W: FinAbGroup, lo: int, subgroups, tail_below="finite-stable",
                 tail_above="finite-stable", o_ref=None, labels=None) -> FilteredObject1:
    """Object from a list of generator lists or Subgroups, bottom to top."""
    levels = []
    for s in subgroups:
        S = s if isinstance(s, Subgroup) else Subgroup.generated_by(W, s)
        levels.append(S)
    return FilteredObject1(W, lo, tuple(levels), tail_below, tail_above, o_ref, labels)


def laurent_object(q: int, lo: int, hi: int, emin: int | None = None,
                   emax: int | None = None, o_ref: int = 0) -> FilteredObject1:
    """Window ``[lo, hi]`` of ``{sum c_e t^e : emin <= e <= emax}`` inside F_q((t)).

    ``F(i) = t^{-i} F_q[[t]]``, so the window keeps exponents
    ``-hi <= e <= -lo - 1``.  ``None`` bounds are infinite.
    """
    if hi < lo:
        raise ValueError("empty window")
    top = -hi if emin is None else max(emin, -hi)
    bot = -lo - 1 if emax is None else min(emax, -lo - 1)
    exps = list(range(top, bot + 1))
    n = len(exps)
    W = FinAbGroup((q,) * n)
    levels = []
    for i in range(lo, hi + 1):
        gens = [[int(k == j) for k in range(n)] for j, e in enumerate(exps) if e >= -i]
        levels.append(Subgroup.generated_by(W, gens))
    above = "trivial" if emin is not None and emin >= -hi else "finite-stable"
    below = "trivial" if emax is not None and emax <= -lo - 1 else "finite-stable"
    o_ref = min(max(o_ref, lo), hi)
    return FilteredObject1(W, lo, tuple(levels), below, above, o_ref, tuple(exps))


# ---------------------------------------------------------------------------
# duality, completion, predicates


def dual1(E):
    """Dual object: reversed window, levels ``F'(i) = F(-i)^perp``."""
    if isinstance(E, FilteredObjectAr1):
        return FilteredObjectAr1(-E.hi, tuple(s.dual() for s in reversed(E.steps)),
                                 E.tail_above, E.tail_below, -E.o_ref)
    levels = [S.annihilator() for S in reversed(E.levels)]
    labels = None
    if E.labels is not None:
        levels = [_reverse_coords(S) for S in levels]
        labels = tuple(-e - 1 for e in reversed(E.labels))
    return FilteredObject1(E.ambient.dual(), -E.hi, tuple(levels), E.tail_above, E.tail_below,
                           -E.o_ref, labels)


def completion_psi(E):
    """Completion.  Window objects are complete, so this re-canonicalizes."""
    if isinstance(E, FilteredObjectAr1):
        return FilteredObjectAr1(E.lo, E.steps, E.tail_below, E.tail_above, E.o_ref)
    levels = tuple(Subgroup.generated_by(E.ambient, S.basis) for S in E.levels)
    return FilteredObject1(E.ambient, E.lo, levels, E.tail_below, E.tail_above, E.o_ref, E.labels)


def is_compact1(E) -> bool:
    """Top reached inside the window and every quotient below it compact."""
    if E.tail_above != "trivial":
        return False
    if isinstance(E, FilteredObjectAr1):
        return all(s.is_compact() for s in E.steps)
    return True


def is_discrete1(E) -> bool:
    if E.tail_below != "trivial":
        return False
    if isinstance(E, FilteredObjectAr1):
        return all(s.is_discrete() for s in E.steps)
    return True


def trivial_object1(lo: int = 0) -> FilteredObject1:
    W = FinAbGroup(())
    return FilteredObject1(W, lo, (Subgroup.whole(W),), "trivial", "trivial", lo)


# ---------------------------------------------------------------------------
# domination and equivalence


@dataclass(frozen=True)
class DominationMap:
    """``source`` dominates ``target``: ``source.level(phi[i]) == target.level(i)``."""

    source: FilteredObject1
    target: FilteredObject1
    phi: tuple[int, ...]

    def __post_init__(self):
        S, T = self.source, self.target
        if S.ambient != T.ambient:
            raise ValueError("domination needs a common ambient group")
        if len(self.phi) != len(T.levels):
            raise ValueError("index map has the wrong length")
        if list(self.phi) != sorted(self.phi):
            raise ValueError("index map is not order-preserving")
        for i, j in zip(range(T.lo, T.hi + 1), self.phi):
            if S.level(j) != T.level(i):
                raise ValueError(f"level {i} is not matched")
        # cofinal at both ends, with the same behaviour past the window
        if self.phi[0] != S.lo or self.phi[-1] != S.hi:
            raise ValueError("index map is not cofinal")
        if (S.tail_below, S.tail_above) != (T.tail_below, T.tail_above):
            raise ValueError("tails differ")


def dominates(E: FilteredObject1, F: FilteredObject1) -> DominationMap | None:
    """A domination of ``F`` by ``E`` if one exists."""
    if E.ambient != F.ambient or (E.tail_below, E.tail_above) != (F.tail_below, F.tail_above):
        return None
    phi, j = [], E.lo
    for S in F.levels:
        while j <= E.hi and E.level(j) != S:
            j += 1
        if j > E.hi:
            return None
        phi.append(j)
    phi[-1] = E.hi if E.level(E.hi) == F.levels[-1] else phi[-1]
    try:
        return DominationMap(E, F, tuple(phi))
    except ValueError:
        return None


def _distinct_chain(E: FilteredObject1) -> tuple[Subgroup, ...]:
    out = []
    for S in E.levels:
        if not out or out[-1] != S:
            out.append(S)
    return tuple(out)


def check_equivalence(E: FilteredObject1, F: FilteredObject1, max_nodes: int = 20000) -> bool:
    """Search for a zig-zag of dominations from ``E`` to ``F``.

    Nodes are strict chains built from the levels of both objects; an edge
    inserts or removes one intermediate level (one domination step).
    """
    if E.ambient != F.ambient or E.labels != F.labels:
        return False
    if (E.tail_below, E.tail_above) != (F.tail_below, F.tail_above):
        return False
    start, goal = _distinct_chain(E), _distinct_chain(F)
    pool = sorted(set(start) | set(goal), key=lambda S: (S.order, S.basis))
    seen = {start}
    todo = deque([start])
    while todo and len(seen) < max_nodes:
        c = todo.popleft()
        if c == goal:
            return True
        nbrs = [c[:k] + c[k + 1:] for k in range(1, len(c) - 1)]
        for S in pool:
            if S in c:
                continue
            for k in range(1, len(c)):
                if c[k - 1] <= S <= c[k]:
                    nbrs.append(c[:k] + (S,) + c[k:])
        for n in nbrs:
            if n not in seen:
                seen.add(n)
                todo.append(n)
    return goal in seen


def refine(E: FilteredObject1, i: int, S: Subgroup) -> FilteredObject1:
    """Insert ``S`` between ``F(i)`` and ``F(i+1)``; indices above shift up by one."""
    if not E.level(i) <= S <= E.level(i + 1):
        raise ValueError("inserted subgroup does not fit between the levels")
    k = i - E.lo + 1
    levels = E.levels[:k] + (S,) + E.levels[k:]
    o_ref = E.o_ref if E.o_ref <= i else E.o_ref + 1
    return FilteredObject1(E.ambient, E.lo, levels, E.tail_below, E.tail_above, o_ref, E.labels)


# ---------------------------------------------------------------------------
# morphisms and admissible triples


def level_table(A: GroupHom, E1: FilteredObject1, E2: FilteredObject1) -> dict[int, int]:
    """For each ``i`` the least ``j`` with ``A(F1(i)) <= F2(j)``."""
    if A.source != E1.ambient or A.target != E2.ambient:
        raise ValueError("map does not go between the ambient groups")
    table = {}
    for i in range(E1.lo, E1.hi + 1):
        img = image_of(A, E1.level(i))
        table[i] = next(j for j in range(E2.lo, E2.hi + 1) if img <= E2.level(j))
    return table


def is_morphism1(A: GroupHom, E1: FilteredObject1, E2: FilteredObject1) -> bool:
    """Window form of the morphism conditions.

    A window map already sends ``F1(lo)`` into ``F2(lo)`` and everything into
    ``F2(hi)``, so the conditions reduce to ``A`` being a homomorphism of the
    ambient groups; finite quotients make the C0 condition automatic.
    """
    try:
        level_table(A, E1, E2)
    except ValueError:
        return False
    return True


def is_level_preserving(A: GroupHom, E1: FilteredObject1, E2: FilteredObject1) -> bool:
    if E1.window != E2.window:
        return False
    return all(j <= i for i, j in level_table(A, E1, E2).items())


@dataclass(frozen=True, eq=False)
class AdmissibleTriple1:
    """``0 -> E1 -> E2 -> E3 -> 0`` on a common window."""

    E1: FilteredObject1
    E2: FilteredObject1
    E3: FilteredObject1
    alpha: GroupHom
    beta: GroupHom

    def __post_init__(self):
        E1, E2, E3 = self.E1, self.E2, self.E3
        if not E1.window == E2.window == E3.window:
            raise ValueError("objects of a triple must share the window")
        if not E1.o_ref == E2.o_ref == E3.o_ref:
            raise ValueError("objects of a triple must share the reference index")
        if self.alpha.source != E1.ambient or self.alpha.target != E2.ambient \
                or self.beta.target != E3.ambient:
            raise ValueError("maps do not match the ambient groups")
        T = AdmissibleTripleC0(self.alpha, self.beta)
        img = self.alpha.image()
        for i in range(E2.lo, E2.hi + 1):
            if image_of(self.alpha, E1.level(i)) != intersect(img, E2.level(i)):
                raise ValueError(f"sub filtration is not induced at level {i}")
            if image_of(self.beta, E2.level(i)) != E3.level(i):
                raise ValueError(f"quotient filtration is not induced at level {i}")
        if E2.tail_below == "trivial" and E1.tail_below != "trivial":
            raise ValueError("a subobject of a discrete object is discrete")
        if E2.tail_above == "trivial" and E3.tail_above != "trivial":
            raise ValueError("a quotient of a compact object is compact")
        object.__setattr__(self, "c0", T)

    def window_triple(self, a: int, b: int) -> AdmissibleTripleC0:
        """The induced C0 triple on ``F(b)/F(a)``."""
        Q1, p1, i1 = self.E1.window_data(a, b)
        Q2, p2, i2 = self.E2.window_data(a, b)
        Q3, p3, i3 = self.E3.window_data(a, b)
        al = _lift(i2, _descend_map(self.E1, a, b, self.alpha, p2))
        be = _lift(i3, _descend_map(self.E2, a, b, self.beta, p3))
        return AdmissibleTripleC0(al, be)

    def dual(self) -> "AdmissibleTriple1":
        return AdmissibleTriple1(dual1(self.E3), dual1(self.E2), dual1(self.E1),
                                 _dual_map(self.beta, self.E3, self.E2),
                                 _dual_map(self.alpha, self.E2, self.E1))

    @classmethod
    def from_subgroup(cls, E2: FilteredObject1, U: Subgroup, tails1=None, tails3=None):
        """Triple with ``E1 = U`` and ``E3 = W/U`` carrying induced filtrations."""
        inj, U_grp = U.as_group()
        Q, proj = quotient(E2.ambient, U)
        lv1 = [preimage(inj, intersect(U, S)) for S in E2.levels]
        lv3 = [image_of(proj, S) for S in E2.levels]
        t1 = tails1 or (E2.tail_below, E2.tail_above)
        t3 = tails3 or (E2.tail_below, E2.tail_above)
        E1 = FilteredObject1(U_grp, E2.lo, tuple(lv1), *t1, E2.o_ref)
        E3 = FilteredObject1(Q, E2.lo, tuple(lv3), *t3, E2.o_ref)
        return cls(E1, E2, E3, inj, proj)


def _dual_map(h: GroupHom, src_dual_of: FilteredObject1, tgt_dual_of: FilteredObject1) -> GroupHom:
    """Dual map written in the (possibly relabelled) coordinates of the dual objects."""
    d = h.dual()
    M = d.matrix
    if tgt_dual_of.labels is not None:
        M = M[::-1, :]
    if src_dual_of.labels is not None:
        M = M[:, ::-1]
    return GroupHom(d.source, d.target, M)


def _descend_map(E: FilteredObject1, a: int, b: int, h: GroupHom, p_target: GroupHom) -> GroupHom:
    """``Q_ab(E) -> W'/S'_a`` induced by ``p_target o h``."""
    Q, p_a, inj = E.window_data(a, b)
    src_inj, _ = E.level(b).as_group()
    g = p_target @ h @ src_inj
    return descend(p_a @ src_inj, g, Q, inj)


def _lift(inj: GroupHom, h: GroupHom) -> GroupHom:
    return lift_through(inj, h)


def lift_through(inj: GroupHom, h: GroupHom) -> GroupHom:
    """``M`` with ``inj o M == h`` for an injective ``inj`` whose image holds ``h``'s."""
    pos = {int(t): s for s, t in enumerate(inj.index_map())}
    X = inj.source
    cols = []
    for j in range(h.source.rank):
        e = h.source.element([int(k == j) for k in range(h.source.rank)])
        y = h(e)
        t = int(h.target.flat_index(np.array([y.residues]))[0]) if h.target.rank else 0
        if t not in pos:
            raise ValueError("map does not factor through the injection")
        cols.append(np.unravel_index(pos[t], X.shape) if X.rank else ())
    M = np.array([[int(c[i]) for c in cols] for i in range(X.rank)], dtype=object)
    return GroupHom(h.source, X, M.reshape(X.rank, h.source.rank))


def descend(proj: GroupHom, h: GroupHom, Q: FinAbGroup | None = None, inj: GroupHom | None = None) -> GroupHom:
    """``M`` with ``M o proj == h`` for a map ``proj`` onto its image.

    With ``inj`` given, ``proj`` lands in ``inj``'s target and ``M`` is defined
    on ``Q = inj.source``.
    """
    if inj is None:
        inj = GroupHom.identity(proj.target)
    Q = inj.source
    im = proj.index_map()
    where = {}
    for s, t in enumerate(im):
        where.setdefault(int(t), s)
    hv = h.index_map()
    cols = []
    for j in range(Q.rank):
        e = Q.element([int(k == j) for k in range(Q.rank)])
        y = inj(e)
        t = int(proj.target.flat_index(np.array([y.residues]))[0]) if proj.target.rank else 0
        s = where[t]
        cols.append(np.unravel_index(int(hv[s]), h.target.shape) if h.target.rank else ())
    M = np.array([[int(c[i]) for c in cols] for i in range(h.target.rank)], dtype=object)
    out = GroupHom(Q, h.target, M.reshape(h.target.rank, Q.rank))
    # well defined: every source point maps consistently
    qmap = np.empty(len(im), dtype=np.int64)
    inv = {int(t): s for s, t in enumerate(inj.index_map())}
    for s, t in enumerate(im):
        qmap[s] = inv[int(t)]
    if not np.array_equal(out.index_map()[qmap], hv):
        raise ValueError("map is not constant on the fibres")
    return out


def coordinate_triple(E2: FilteredObject1, split: int, sub: str = "upper") -> AdmissibleTriple1:
    """Split a labelled Laurent window at exponent ``split``.

    ``sub="upper"``: ``E1 = {e >= split}`` (a ``t^split F_q[[t]]`` window) and
    ``E3 = {e < split}``; ``sub="lower"`` swaps the roles.
    """
    if E2.labels is None:
        raise ValueError("coordinate splitting needs a labelled object")
    q = E2.ambient.moduli[0] if E2.ambient.rank else 2
    lo, hi = E2.window
    emin, emax = E2.labels[0] if E2.labels else None, E2.labels[-1] if E2.labels else None
    real_lo = None if E2.tail_above != "trivial" else emin
    real_hi = None if E2.tail_below != "trivial" else emax
    up = laurent_object(q, lo, hi, split if real_lo is None else max(split, real_lo), real_hi, E2.o_ref)
    down = laurent_object(q, lo, hi, real_lo, split - 1 if real_hi is None else min(split - 1, real_hi),
                          E2.o_ref)
    E1, E3 = (up, down) if sub == "upper" else (down, up)
    pos = {e: k for k, e in enumerate(E2.labels)}
    A = np.zeros((E2.ambient.rank, E1.ambient.rank), dtype=object)
    for j, e in enumerate(E1.labels):
        A[pos[e], j] = 1
    B = np.zeros((E3.ambient.rank, E2.ambient.rank), dtype=object)
    for j, e in enumerate(E3.labels):
        B[j, pos[e]] = 1
    return AdmissibleTriple1(E1, E2, E3, GroupHom(E1.ambient, E2.ambient, A),
                             GroupHom(E2.ambient, E3.ambient, B))


# ---------------------------------------------------------------------------
# fibered products and amalgams


def _product_levels(X: FinAbGroup, maps, objs, window) -> tuple[Subgroup, ...]:
    lo, hi = window
    out = []
    for i in range(lo, hi + 1):
        S = Subgroup.whole(X)
        for m, E in zip(maps, objs):
            S = intersect(S, preimage(m, E.level(i)))
        out.append(S)
    return tuple(out)


def _tails_meet(*objs):
    below = "trivial" if all(E.tail_below == "trivial" for E in objs) else "finite-stable"
    above = "trivial" if all(E.tail_above == "trivial" for E in objs) else "finite-stable"
    return below, above


def fibered_product1(T: AdmissibleTriple1, D: FilteredObject1, gamma: GroupHom):
    """``E2 x_{E3} D`` with ``G(k) = (F2(k) x H(k)) & X`` on the common window.

    Returns ``(triple E1 -> X -> D, (X -> E2, gamma))``.
    """
    if not is_morphism1(gamma, D, T.E3) or not is_level_preserving(gamma, D, T.E3):
        raise ValueError("gamma is not a level-preserving morphism D -> E3")
    P, (iE, iD), (qE, qD) = direct_product(T.E2.ambient, D.ambient)
    diff = GroupHom(P, T.E3.ambient, (T.beta @ qE).matrix - (gamma @ qD).matrix)
    inj, X = diff.kernel().as_group()
    pE, pD = qE @ inj, qD @ inj
    levels = _product_levels(X, (pE, pD), (T.E2, D), T.E2.window)
    below, above = _tails_meet(T.E2, D)
    EX = FilteredObject1(X, T.E2.lo, levels, below, above, T.E2.o_ref)
    a = lift_through(inj, iE @ T.alpha)
    triple = AdmissibleTriple1(T.E1, EX, D, a, pD)
    if (T.beta @ pE) != (gamma @ pD):
        raise ValueError("square does not commute")
    return triple, (pE, gamma)


def amalgam1(T: AdmissibleTriple1, D: FilteredObject1, delta: GroupHom):
    """Pushout ``D +_{E1} E2`` with levels the images of ``H(k) x F2(k)``.

    Returns ``(triple D -> Y -> E3, (delta, E2 -> Y))``.
    """
    if not is_morphism1(delta, T.E1, D) or not is_level_preserving(delta, T.E1, D):
        raise ValueError("delta is not a level-preserving morphism E1 -> D")
    P, (iD, iE), (qD, qE) = direct_product(D.ambient, T.E2.ambient)
    rel = GroupHom(T.E1.ambient, P, (iD @ delta).matrix - (iE @ T.alpha).matrix)
    Y, proj = quotient(P, rel.image())
    jD, jE = proj @ iD, proj @ iE
    levels = []
    for i in range(T.E2.lo, T.E2.hi + 1):
        levels.append(image_of(jD, D.level(i)) + image_of(jE, T.E2.level(i)))
    below, above = _tails_meet(T.E2, D)
    EY = FilteredObject1(Y, T.E2.lo, tuple(levels), below, above, T.E2.o_ref)
    b = descend(proj, GroupHom(P, T.E3.ambient, (T.beta @ qE).matrix))
    triple = AdmissibleTriple1(D, EY, T.E3, jD, b)
    if (jE @ T.alpha) != (jD @ delta):
        raise ValueError("square does not commute")
    return triple, (delta, jE)


def ar_steps_exact(P: FilteredObjectAr1, Q: FilteredObjectAr1, R: FilteredObjectAr1) -> bool:
    """Stepwise bookkeeping for an archimedean triple: dimensions add and
    finite parts multiply on every step of a common window."""
    if not P.window == Q.window == R.window:
        return False
    for a, b, c in zip(P.steps, Q.steps, R.steps):
        if a.dimension + c.dimension != b.dimension:
            return False
        if a.A.order * c.A.order != b.A.order:
            return False
    return True
