"""Two-level filtered objects built from coordinate regions of F_q((u))((t)).

A point of the plane ``(a, b)`` stands for the monomial ``u^a t^b``.  An
object is the set of series supported in a region ``R`` of the plane, with

* outer filtration ``F(i) = {b >= -i}`` (fractional ideals in ``t``),
* inner filtration on every slab ``F(i)/F(j)``: ``G(k) = {a >= -k}``.

Regions are stored row by row: finitely many explicit rows plus one
pattern repeated below them and one repeated above them.  Every row is a
finite union of integer intervals whose ends may be infinite.  This keeps
sub- and quotient objects of a local field (half planes, strips, the
``F_q[[u]]((t))`` and ``F_q((u))[[t]]`` lattices, their complements) exact.

A *box* ``[a0, a1] x [b0, b1]`` is a presentation window.  In the outer
direction it is the window ``(hi, lo) = (-b0, -b1 - 1)``; in the inner
direction functions are supported in ``a >= a0`` and invariant past
``a1``.  The predicates and all canonical measure data are read off the
region itself, not off the box.

Duality uses the residue pairing ``x_{a,b} y_{-a-1,-b-1}``: the dual of a
region object is the reflected region, the dual filtration is again of the
form ``{b >= -i}`` after negating indices, and a symmetric box of the full
field is self-dual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .archimed import C0arObject
from .filt1 import AdmissibleTriple1, FilteredObject1, FilteredObjectAr1, chain_object, fibered_product1
from .finabel import FinAbGroup, GroupHom

INF = math.inf

# ---------------------------------------------------------------------------
# integer interval sets


def _norm(ivs) -> tuple[tuple[float, float], ...]:
    out: list[list[float]] = []
    for lo, hi in sorted((lo, hi) for lo, hi in ivs if lo <= hi):
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def iv_union(x, y):
    return _norm(list(x) + list(y))


def iv_complement(x):
    out, start = [], -INF
    for lo, hi in x:
        if lo > start:
            out.append((start, lo - 1))
        start = hi + 1
    if start < INF:
        out.append((start, INF))
    return _norm(out)


def iv_intersect(x, y):
    return iv_complement(iv_union(iv_complement(x), iv_complement(y)))


def iv_minus(x, y):
    return iv_intersect(x, iv_complement(y))


def iv_shift(x, d: int):
    return tuple((lo + d, hi + d) for lo, hi in x)


def iv_reflect(x):
    """``a -> -a - 1``."""
    return _norm((-hi - 1, -lo - 1) for lo, hi in x)


def iv_count(x, lo=-INF, hi=INF) -> float:
    """Number of integers of ``x`` inside ``[lo, hi]`` (may be infinite)."""
    n = 0
    for a, b in x:
        a, b = max(a, lo), min(b, hi)
        if a <= b:
            n += b - a + 1
    return n


def iv_contains(x, a: int) -> bool:
    return any(lo <= a <= hi for lo, hi in x)


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Region:
    """Rows ``b0 .. b0+len(rows)-1`` explicit, ``below``/``above`` repeated."""

    b0: int
    rows: tuple
    below: tuple = ()
    above: tuple = ()

    def __post_init__(self):
        rows = [_norm(r) for r in self.rows]
        below, above = _norm(self.below), _norm(self.above)
        b0 = self.b0
        while rows and rows[0] == below:
            rows.pop(0)
            b0 += 1
        while rows and rows[-1] == above:
            rows.pop()
        if not rows and below == above:
            b0 = 0
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "below", below)
        object.__setattr__(self, "above", above)
        object.__setattr__(self, "b0", b0)

    # -- constructors
    @classmethod
    def rect(cls, a0=-INF, a1=INF, b0=-INF, b1=INF) -> "Region":
        row = ((a0, a1),)
        if b0 == -INF and b1 == INF:
            return cls(0, (), row, row)
        if b0 == -INF:
            return cls(int(b1) + 1, (), row, ())
        if b1 == INF:
            return cls(int(b0), (), (), row)
        return cls(int(b0), tuple(row for _ in range(int(b1) - int(b0) + 1)), (), ())

    @classmethod
    def plane(cls) -> "Region":
        return cls.rect()

    @classmethod
    def empty(cls) -> "Region":
        return cls(0, (), (), ())

    # -- rows
    @property
    def b1(self) -> int:
        return self.b0 + len(self.rows) - 1

    def row(self, b: int):
        if b < self.b0:
            return self.below
        if b > self.b1:
            return self.above
        return self.rows[b - self.b0]

    def _span(self, other: "Region") -> tuple[int, int]:
        live = [r for r in (self, other) if r.rows or r.below != r.above]
        los = [r.b0 for r in live]
        his = [r.b1 for r in live]
        if not los:
            return 0, -1
        return min(los), max(his)

    def _combine(self, other: "Region", op) -> "Region":
        lo, hi = self._span(other)
        rows = tuple(op(self.row(b), other.row(b)) for b in range(lo, hi + 1))
        return Region(lo, rows, op(self.below, other.below), op(self.above, other.above))

    def __or__(self, other):
        return self._combine(other, iv_union)

    def __and__(self, other):
        return self._combine(other, iv_intersect)

    def __sub__(self, other):
        return self._combine(other, iv_minus)

    def contains(self, a: int, b: int) -> bool:
        return iv_contains(self.row(b), a)

    def issubset(self, other: "Region") -> bool:
        return (self - other).is_empty

    @property
    def is_empty(self) -> bool:
        return not self.below and not self.above and not any(self.rows)

    def shift(self, da: int, db: int) -> "Region":
        return Region(self.b0 + db, tuple(iv_shift(r, da) for r in self.rows),
                      iv_shift(self.below, da), iv_shift(self.above, da))

    def reflect(self) -> "Region":
        """``(a, b) -> (-a-1, -b-1)``."""
        rows = tuple(iv_reflect(r) for r in reversed(self.rows))
        return Region(-self.b1 - 1, rows,
                      iv_reflect(self.above), iv_reflect(self.below))

    # -- extent
    @property
    def b_min(self) -> float:
        if self.below:
            return -INF
        for k, r in enumerate(self.rows):
            if r:
                return self.b0 + k
        return INF if not self.above else self.b1 + 1

    @property
    def b_max(self) -> float:
        if self.above:
            return INF
        for k in range(len(self.rows) - 1, -1, -1):
            if self.rows[k]:
                return self.b0 + k
        return -INF if not self.below else self.b0 - 1

    def _patterns(self):
        return [self.below, self.above, *self.rows]

    @property
    def rows_bounded_below(self) -> bool:
        return all(not r or r[0][0] > -INF for r in self._patterns())

    @property
    def rows_bounded_above(self) -> bool:
        return all(not r or r[-1][1] < INF for r in self._patterns())

    def row_a_min(self, b: int) -> float:
        r = self.row(b)
        return r[0][0] if r else INF

    def row_a_max(self, b: int) -> float:
        r = self.row(b)
        return r[-1][1] if r else -INF

    def to_json(self) -> dict:
        def enc(r):
            return [[None if math.isinf(v) else int(v) for v in iv] for iv in r]
        return {"b0": self.b0, "rows": [enc(r) for r in self.rows],
                "below": enc(self.below), "above": enc(self.above)}

    @classmethod
    def from_json(cls, d: dict) -> "Region":
        def dec(r):
            return tuple((-INF if lo is None else lo, INF if hi is None else hi) for lo, hi in r)
        return cls(d["b0"], tuple(dec(r) for r in d["rows"]), dec(d["below"]), dec(d["above"]))


# ---------------------------------------------------------------------------
# boxes and objects


@dataclass(frozen=True)
class Box:
    a0: int
    a1: int
    b0: int
    b1: int

    def __post_init__(self):
        if self.a1 < self.a0 or self.b1 < self.b0:
            raise ValueError("box windows must be nonempty")

    @property
    def lo(self) -> int:
        return -self.b1 - 1

    @property
    def hi(self) -> int:
        return -self.b0

    def reflect(self) -> "Box":
        return Box(-self.a1 - 1, -self.a0 - 1, -self.b1 - 1, -self.b0 - 1)

    def shift(self, da: int, db: int) -> "Box":
        return Box(self.a0 + da, self.a1 + da, self.b0 + db, self.b1 + db)

    def __and__(self, other: "Box") -> "Box":
        return Box(max(self.a0, other.a0), min(self.a1, other.a1),
                   max(self.b0, other.b0), min(self.b1, other.b1))


def _mass(a: int, q: int) -> float:
    """Reference point mass of one coordinate: ``F_q[[u]]`` has volume 1."""
    return 1.0 / q if a >= 0 else 1.0


@dataclass(frozen=True)
class FilteredObject2:
    """Series over ``F_q`` supported in ``region``, presented on ``box``."""

    q: int
    region: Region
    box: Box

    def __post_init__(self):
        if self.q < 2 or any(self.q % p == 0 for p in range(2, int(self.q ** 0.5) + 1)):
            raise ValueError("q must be prime")

    @property
    def core(self) -> tuple:
        """Presentation-independent identity (same object, any box)."""
        return (self.q, self.region)

    def with_box(self, box: Box) -> "FilteredObject2":
        return FilteredObject2(self.q, self.region, box)

    @property
    def window(self) -> tuple[int, int]:
        return self.box.lo, self.box.hi

    @cached_property
    def cells(self) -> tuple[tuple[int, int], ...]:
        bx = self.box
        return tuple((a, b) for b in range(bx.b0, bx.b1 + 1) for a in range(bx.a0, bx.a1 + 1)
                     if self.region.contains(a, b))

    @cached_property
    def cell_index(self) -> dict:
        return {c: k for k, c in enumerate(self.cells)}

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.q,) * len(self.cells)

    @property
    def order(self) -> int:
        return self.q ** len(self.cells)

    @cached_property
    def masses(self) -> np.ndarray:
        return np.array([_mass(a, self.q) for a, _ in self.cells])

    def level_cells(self, i: int) -> tuple:
        return tuple(c for c in self.cells if c[1] >= -i)

    def slab(self, j: int, i: int) -> FilteredObject1:
        """The C1 object ``F(i)/F(j)`` on the box's inner window."""
        if j > i:
            raise ValueError("slab needs j <= i")
        bx = self.box
        rows = [b for b in range(-i, -j) if bx.b0 <= b <= bx.b1]
        cells = [(a, b) for (a, b) in self.cells if b in rows]
        n = len(cells)
        W = FinAbGroup((self.q,) * n)
        lo = -bx.a1 - 1
        levels = []
        for k in range(lo, -bx.a0 + 1):
            levels.append([[int(m == t) for m in range(n)] for t, (a, _) in enumerate(cells) if a >= -k])
        compact = all(self.region.row_a_min(b) >= bx.a0 for b in range(-i, -j))
        discrete = all(self.region.row_a_max(b) <= bx.a1 for b in range(-i, -j))
        return chain_object(W, lo, levels, "trivial" if discrete else "finite-stable",
                            "trivial" if compact else "finite-stable", min(max(0, lo), -bx.a0))

    def to_json(self) -> dict:
        b = self.box
        return {"q": self.q, "region": self.region.to_json(), "box": [b.a0, b.a1, b.b0, b.b1]}

    @classmethod
    def from_json(cls, d: dict) -> "FilteredObject2":
        return cls(d["q"], Region.from_json(d["region"]), Box(*d["box"]))


@dataclass(frozen=True)
class FilteredObjectAr2:
    """Window of ``R((t))``-type objects: every consecutive quotient is an
    archimedean C0 object, the ``t``-degree ``b`` sitting between levels
    ``-b - 1`` and ``-b``."""

    b0: int
    b1: int
    degree: C0arObject = C0arObject(FinAbGroup(()), 0, 0, 1)
    tail_below: str = "finite-stable"
    tail_above: str = "finite-stable"

    @property
    def window(self) -> tuple[int, int]:
        return -self.b1 - 1, -self.b0

    def slab(self, j: int, i: int) -> FilteredObjectAr1:
        return FilteredObjectAr1(j, tuple(self.degree for _ in range(j, i)), "trivial", "trivial", j)

    def level_object(self, b: int) -> C0arObject:
        if not self.b0 <= b <= self.b1:
            raise ValueError("degree outside the window")
        return self.degree


def make_local_field2(q, t_window, u_window=None, cutoff: int | None = None):
    """Box of ``F_q((u))((t))`` (``q`` prime) or of ``R((t))`` (``q == "R"``).

    ``t_window = (b0, b1)`` and ``u_window = (a0, a1)`` are exponent ranges.
    """
    b0, b1 = t_window
    if b1 < b0:
        raise ValueError("empty t-window")
    if q == "R":
        return FilteredObjectAr2(b0, b1)
    if u_window is None or u_window[1] < u_window[0]:
        raise ValueError("empty u-window")
    return FilteredObject2(int(q), Region.plane(), Box(u_window[0], u_window[1], b0, b1))


def region_object(q: int, region: Region, box: Box) -> FilteredObject2:
    return FilteredObject2(q, region, box)


# ---------------------------------------------------------------------------
# duality and predicates


def dual2(E):
    if isinstance(E, FilteredObjectAr2):
        return FilteredObjectAr2(-E.b1 - 1, -E.b0 - 1, E.degree.dual(), E.tail_above, E.tail_below)
    return FilteredObject2(E.q, E.region.reflect(), E.box.reflect())


def completion_omega(E):
    """Completion.  Region objects are complete: this canonicalizes."""
    if isinstance(E, FilteredObjectAr2):
        return FilteredObjectAr2(E.b0, E.b1, E.degree, E.tail_below, E.tail_above)
    return FilteredObject2(E.q, Region(E.region.b0, E.region.rows, E.region.below, E.region.above),
                           E.box)


def predicates2(E) -> dict[str, bool]:
    """``c``: some level holds everything; ``d``: some level is zero;
    ``cf``/``df``: every slab is a compact/discrete C1 object."""
    if isinstance(E, FilteredObjectAr2):
        return {"c": E.tail_above == "trivial", "d": E.tail_below == "trivial",
                "cf": E.degree.is_compact(), "df": E.degree.is_discrete()}
    R = E.region
    return {"c": R.b_min > -INF, "d": R.b_max < INF,
            "cf": R.rows_bounded_below, "df": R.rows_bounded_above}


def top_level(E: FilteredObject2) -> int:
    """Smallest ``i`` with ``F(i) = V`` (c-objects)."""
    if not predicates2(E)["c"]:
        raise ValueError("not a c-object")
    return -int(E.region.b_min) if E.region.b_min < INF else E.box.lo


def bottom_level(E: FilteredObject2) -> int:
    """Largest ``i`` with ``F(i) = 0`` (d-objects)."""
    if not predicates2(E)["d"]:
        raise ValueError("not a d-object")
    return -int(E.region.b_max) - 1 if E.region.b_max > -INF else E.box.hi


# ---------------------------------------------------------------------------
# admissible triples of coordinate objects


@dataclass(frozen=True)
class AdmissibleTriple2:
    """``0 -> E1 -> E2 -> E3 -> 0`` with ``R2 = R1 + R3`` (disjoint).

    The sub is the coordinate subspace on ``R1``, the quotient is read in
    the complementary coordinates.  Both index maps are the identity.
    """

    E1: FilteredObject2
    E2: FilteredObject2
    E3: FilteredObject2

    def __post_init__(self):
        E1, E2, E3 = self.E1, self.E2, self.E3
        if not E1.q == E2.q == E3.q:
            raise ValueError("objects of a triple must share q")
        if not E1.box == E2.box == E3.box:
            raise ValueError("objects of a triple must share the box")
        if not (E1.region & E3.region).is_empty or (E1.region | E3.region) != E2.region:
            raise ValueError("regions do not split the middle object")

    @classmethod
    def split(cls, E2: FilteredObject2, sub: Region) -> "AdmissibleTriple2":
        R1 = E2.region & sub
        return cls(E2.__class__(E2.q, R1, E2.box), E2,
                   E2.__class__(E2.q, E2.region - R1, E2.box))

    def gamma(self, i: int) -> int:
        return i

    def eps(self, i: int) -> int:
        return i

    @cached_property
    def sub_axes(self) -> tuple[int, ...]:
        idx = self.E2.cell_index
        return tuple(idx[c] for c in self.E1.cells)

    @cached_property
    def quot_axes(self) -> tuple[int, ...]:
        idx = self.E2.cell_index
        return tuple(idx[c] for c in self.E3.cells)

    def dual(self) -> "AdmissibleTriple2":
        return AdmissibleTriple2(dual2(self.E3), dual2(self.E2), dual2(self.E1))

    def with_box(self, box: Box) -> "AdmissibleTriple2":
        return AdmissibleTriple2(self.E1.with_box(box), self.E2.with_box(box), self.E3.with_box(box))

    def slab_triple(self, j: int, i: int) -> AdmissibleTriple1:
        """Induced C1 triple on ``F(i)/F(j)``."""
        S1, S2, S3 = (E.slab(j, i) for E in (self.E1, self.E2, self.E3))
        pos = {c: k for k, c in enumerate(c for c in self.E2.cells if -i <= c[1] < -j)}
        c1 = [c for c in self.E1.cells if -i <= c[1] < -j]
        c3 = [c for c in self.E3.cells if -i <= c[1] < -j]
        A = np.zeros((len(pos), len(c1)), dtype=object)
        for k, c in enumerate(c1):
            A[pos[c], k] = 1
        B = np.zeros((len(c3), len(pos)), dtype=object)
        for k, c in enumerate(c3):
            B[k, pos[c]] = 1
        return AdmissibleTriple1(S1, S2, S3, GroupHom(S1.ambient, S2.ambient, A),
                                 GroupHom(S2.ambient, S3.ambient, B))


def _inclusion(src: FilteredObject1, tgt: FilteredObject1, src_cells, tgt_cells) -> GroupHom:
    pos = {c: k for k, c in enumerate(tgt_cells)}
    A = np.zeros((len(tgt_cells), len(src_cells)), dtype=object)
    for k, c in enumerate(src_cells):
        A[pos[c], k] = 1
    return GroupHom(src.ambient, tgt.ambient, A)


def fibered_product2(T: AdmissibleTriple2, D: FilteredObject2):
    """``E2 x_{E3} D`` for a coordinate subobject ``D`` of ``E3``.

    Returns ``(top, square)``: the triple ``E1 -> X -> D`` and the other
    three triples of the base-change diagram under keys ``main`` (``T``),
    ``left`` (``X -> E2 -> B``) and ``right`` (``D -> E3 -> B``).
    """
    if D.q != T.E2.q or D.box != T.E2.box or not D.region.issubset(T.E3.region):
        raise ValueError("D -> E3 is not a coordinate morphism")
    X = FilteredObject2(D.q, T.E1.region | D.region, D.box)
    B = FilteredObject2(D.q, T.E3.region - D.region, D.box)
    top = AdmissibleTriple2(T.E1, X, D)
    square = {"main": T, "top": top, "left": AdmissibleTriple2(X, T.E2, B),
              "right": AdmissibleTriple2(D, T.E3, B)}
    return top, square


def amalgam2(T: AdmissibleTriple2, H: FilteredObject2):
    """``E3 +_{E2} H`` for a coordinate object ``H`` containing ``E2``.

    Returns ``(outer, square)`` with ``outer = E1 -> H -> H/E1`` and the
    triples ``main``, ``upper`` (``E2 -> H -> L``) and ``side``
    (``E3 -> H/E1 -> L``).
    """
    if H.q != T.E2.q or H.box != T.E2.box or not T.E2.region.issubset(H.region):
        raise ValueError("E2 -> H is not a coordinate morphism")
    M = FilteredObject2(H.q, H.region - T.E1.region, H.box)
    L = FilteredObject2(H.q, H.region - T.E2.region, H.box)
    outer = AdmissibleTriple2(T.E1, H, M)
    square = {"main": T, "outer": outer, "upper": AdmissibleTriple2(T.E2, H, L),
              "side": AdmissibleTriple2(T.E3, M, L)}
    return outer, square


def levelwise_product_orders(T: AdmissibleTriple2, D: FilteredObject2) -> list[dict]:
    """Slabwise C1 fibered products against the coordinate construction.

    For every consecutive slab of the box, ``filt1.fibered_product1`` is run
    on the induced C1 data; its ambient order is compared with the
    coordinate product and with ``|E2| |D| / |E3|``.
    """
    top, _ = fibered_product2(T, D)
    out = []
    for i in range(T.E2.box.lo + 1, T.E2.box.hi + 1):
        j = i - 1
        t1 = T.slab_triple(j, i)
        Ds = D.slab(j, i)
        e3 = [c for c in T.E3.cells if -i <= c[1] < -j]
        dc = [c for c in D.cells if -i <= c[1] < -j]
        gamma = _inclusion(Ds, t1.E3, dc, e3)
        prod, _ = fibered_product1(t1, Ds, gamma)
        X = top.E2.slab(j, i)
        out.append({"level": i, "product": prod.E2.ambient.order, "coordinate": X.ambient.order,
                    "formula": t1.E2.ambient.order * Ds.ambient.order // t1.E3.ambient.order})
    return out


# ---------------------------------------------------------------------------
# automorphisms


def _series_mul(x: dict, y: dict, q: int, a_cap: int, b_cap: int) -> dict:
    out: dict = {}
    for (a, b), c in x.items():
        for (a2, b2), c2 in y.items():
            k = (a + a2, b + b2)
            if k[0] >= a_cap or k[1] >= b_cap:
                continue
            out[k] = (out.get(k, 0) + c * c2) % q
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class Automorphism2:
    """``x -> c u^alpha t^beta U x`` on series, optionally followed by a
    finite permutation ``perm`` of the ``u``-exponents inside every row.

    ``unit`` lists the terms ``((a, b), coeff)`` of ``U``: ``U = 1 + ...``
    with ``b >= 0`` and ``a >= 1`` when ``b == 0``.  ``order = (a_cap,
    b_cap)`` records the truncation used for products and inverses.
    """

    alpha: int = 0
    beta: int = 0
    scalar: int = 1
    unit: tuple = ()
    perm: tuple = ()
    order: tuple = (16, 16)

    @property
    def is_monomial(self) -> bool:
        return not self.unit and not self.perm

    def series(self, q: int) -> dict:
        s = {(0, 0): 1}
        for (a, b), c in self.unit:
            if b < 0 or (b == 0 and a < 1):
                raise ValueError("unit terms must satisfy b >= 0 and a >= 1 when b == 0")
            s[(a, b)] = (s.get((a, b), 0) + c) % q
        return {k: v for k, v in s.items() if v}

    def compose(self, other: "Automorphism2", q: int) -> "Automorphism2":
        """``self o other``; scalars and unit series are reduced mod ``q``."""
        if self.perm or other.perm:
            if self.unit or other.unit or self.alpha or other.alpha:
                raise ValueError("exponent permutations compose only with t-shifts and scalars")
            p, r = dict(self.perm), dict(other.perm)
            keys = set(p) | set(r)
            perm = tuple(sorted((a, p.get(r.get(a, a), r.get(a, a))) for a in keys
                                if p.get(r.get(a, a), r.get(a, a)) != a))
            return Automorphism2(0, self.beta + other.beta, (self.scalar * other.scalar) % q, (), perm,
                                 self.order)
        a_cap, b_cap = (min(x, y) for x, y in zip(self.order, other.order))
        # g(h x) = c_g u^ag t^bg U_g (c_h u^ah t^bh U_h x): the unit of h is
        # shifted by nothing since units commute with monomials
        U = _series_mul(self.series(q), other.series(q), q, a_cap, b_cap)
        terms = tuple(sorted((k, v) for k, v in U.items() if k != (0, 0)))
        return Automorphism2(self.alpha + other.alpha, self.beta + other.beta,
                             (self.scalar * other.scalar) % q, terms, (), (a_cap, b_cap))

    def inverse(self, q: int) -> "Automorphism2":
        if self.perm:
            inv = {b: a for a, b in self.perm}
            return Automorphism2(-self.alpha, -self.beta, pow(self.scalar, -1, q), (),
                                 tuple(sorted(inv.items())), self.order)
        if not self.unit:
            return Automorphism2(-self.alpha, -self.beta, pow(self.scalar, -1, q), (), (), self.order)
        U = self.series(q)
        a_cap, b_cap = self.order
        inv = _series_inverse(U, q, a_cap, b_cap)
        terms = tuple(sorted((k, v) for k, v in inv.items() if k != (0, 0)))
        return Automorphism2(-self.alpha, -self.beta, pow(self.scalar, -1, q), terms, (), self.order)

    def cell_map(self, a: int, b: int) -> tuple[int, int]:
        """Image of the monomial position under the monomial part."""
        p = dict(self.perm)
        return p.get(a, a) + self.alpha, b + self.beta

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "scalar": self.scalar,
                "unit": [[a, b, c] for (a, b), c in self.unit], "perm": [list(p) for p in self.perm]}


def _series_inverse(U: dict, q: int, a_cap: int, b_cap: int) -> dict:
    """Inverse of ``U = 1 + ...`` modulo ``u^a_cap`` and ``t^b_cap``."""
    inv = {(0, 0): 1}
    rest = {k: (-v) % q for k, v in U.items() if k != (0, 0)}
    power = {(0, 0): 1}
    # 1/(1 + r) = sum (-r)^n; the series terminates by the caps since r has
    # positive total order in (b, then a)
    for _ in range(a_cap * b_cap + a_cap + b_cap + 2):
        power = _series_mul(power, rest, q, a_cap, b_cap)
        if not power:
            break
        for k, v in power.items():
            inv[k] = (inv.get(k, 0) + v) % q
    return {k: v for k, v in inv.items() if v}


def apply_series(g: Automorphism2, q: int, x: dict, a_cap: int, b_cap: int) -> dict:
    """``g x`` for a sparse series ``x`` (``{(a, b): coeff}``) with caps."""
    if g.perm:
        p = dict(g.perm)
        x = {(p.get(a, a), b): c for (a, b), c in x.items()}
    y = _series_mul(g.series(q), x, q, a_cap, b_cap)
    return {(a + g.alpha, b + g.beta): (c * g.scalar) % q for (a, b), c in y.items()}


def _region_preserved(g: Automorphism2, R: Region, q: int) -> str | None:
    if g.perm:
        moved = {a for a, b in g.perm if a != b}
        for b in range(int(max(R.b0 - 1, -64)), int(min(R.b1 + 2, 64))):
            row = R.row(b)
            if any(iv_contains(row, a) for a in moved) and not all(iv_contains(row, a) for a in moved):
                return f"exponent permutation leaves row {b}"
    if R.shift(g.alpha, g.beta) != R:
        return "monomial part does not preserve the region"
    for (a, b), _ in g.series(q).items():
        if (a, b) != (0, 0) and not R.shift(a, b).issubset(R):
            return f"unit term u^{a} t^{b} does not preserve the region"
    return None


def check_aut(g: Automorphism2, E: FilteredObject2) -> dict:
    """Diagnostic check of the filtration conditions on ``E``'s box.

    ``aut_prime``: every outer level maps onto an outer level, order
    preserving, and so does ``g^{-1}``.  ``star``: on every single-row slab
    each inner level maps onto an inner level, order preserving.  Both are
    verified by applying ``g`` to the monomials of the box.
    """
    q = E.q
    report = {"aut_prime": False, "star": False, "level_map": {}, "inner_map": {}, "witness": None}
    bad = _region_preserved(g, E.region, q)
    if bad:
        report["witness"] = bad
        return report
    bx = E.box
    a_cap = bx.a1 + abs(g.alpha) + 8
    b_cap = bx.b1 + abs(g.beta) + 8
    lead_ok = True
    for (a, b) in E.cells:
        img = apply_series(g, q, {(a, b): 1}, a_cap + abs(a), b_cap + abs(b))
        ta, tb = g.cell_map(a, b)
        if img.get((ta, tb), 0) == 0 or min(k[1] for k in img) != tb:
            lead_ok = False
            report["witness"] = f"leading term of the image of u^{a} t^{b} is wrong"
            break
        row_terms = [k[0] for k in img if k[1] == tb]
        if min(row_terms) < ta and not g.perm:
            lead_ok = False
            report["witness"] = f"image of u^{a} t^{b} drops below its row level"
            break
    if not lead_ok:
        return report
    report["level_map"] = {i: i - g.beta for i in range(bx.lo, bx.hi + 1)}
    report["aut_prime"] = True
    # inner levels on single rows: G(k) = {a >= -k}
    star, inner = True, {}
    for b in range(bx.b0, bx.b1 + 1):
        row = [a for a in range(bx.a0, bx.a1 + 1) if E.region.contains(a, b)]
        for k in range(-bx.a1, -bx.a0 + 1):
            src = {a for a in row if a >= -k}
            img = {g.cell_map(a, b)[0] for a in src}
            target_row = [a for a in range(bx.a0 + g.alpha, bx.a1 + g.alpha + 1)
                          if E.region.contains(a, b + g.beta)]
            levels = [kk for kk in range(-bx.a1 - g.alpha - 1, -bx.a0 - g.alpha + 1)
                      if img == {a for a in target_row if a >= -kk}]
            if not levels:
                star = False
                report["witness"] = f"inner level {k} of row {b} is not mapped to a level"
                break
            inner[(b, k)] = levels[0]
        if not star:
            break
    report["star"] = star
    report["inner_map"] = inner if star else {}
    return report
