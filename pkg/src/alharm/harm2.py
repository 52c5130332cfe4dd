"""Functions and distributions on two-level coordinate objects.

An element is stored on one box.  A function ``f`` on the box stands for
``f (x) c b(lo, o)``: the table, a scalar ``c`` and the reference measure
between the deepest level ``lo`` of the box and the base level ``o``.
Distributions carry ``c' b(o, lo)``, and pairing is ``c c' sum f G``.

Changing the box is exact in one direction for each kind:

========  ======================  ======================================
kind      outer (rows)            inner (``u``-range)
========  ======================  ======================================
function  shrink: restrict top    grow: zero below ``a0``, constant
          rows at 0, integrate    above ``a1``
          bottom rows
dist      grow: ``delta_0`` on    shrink: slice low cells at 0, sum
          top rows, masses on     high cells
          bottom rows
========  ======================  ======================================

The remaining directions are attempted only when the element happens to
have the required product form, and otherwise raise.

Every element box must satisfy ``a0 <= 0 <= a1 + 1``: the point masses
``m(a) = 1/q`` (``a >= 0``) and ``1`` (``a < 0``) then compute integrals
over the invisible part of each row correctly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .filt2 import (AdmissibleTriple2, Box, FilteredObject2, Region, amalgam2, bottom_level, dual2,
                    fibered_product2, predicates2, top_level)
from .finabel import reflect
from .vmeas import VirtualMeasure, canonical_delta, canonical_one, dual_transport

DENSE_LIMIT = 1 << 20


def mass(a: int, q: int) -> float:
    return 1.0 / q if a >= 0 else 1.0


def _delta0(q: int) -> np.ndarray:
    v = np.zeros(q, dtype=complex)
    v[0] = 1.0
    return v


def _check_box(box: Box):
    if not box.a0 <= 0 <= box.a1 + 1:
        raise ValueError(f"box u-range [{box.a0}, {box.a1}] must satisfy a0 <= 0 <= a1 + 1")


def _as_table(parent: FilteredObject2, table) -> np.ndarray:
    if parent.order > DENSE_LIMIT:
        raise ValueError(f"dense table of size {parent.order} is too large; use the factored form")
    t = np.asarray(table, dtype=complex)
    if t.shape != parent.shape:
        t = t.reshape(parent.shape)
    return t


@dataclass(frozen=True, eq=False)
class SchwartzC2:
    parent: FilteredObject2
    table: np.ndarray
    scalar: complex = 1.0
    o: int = 0

    def __post_init__(self):
        _check_box(self.parent.box)
        object.__setattr__(self, "table", _as_table(self.parent, self.table))
        object.__setattr__(self, "scalar", complex(self.scalar))

    @property
    def values(self) -> np.ndarray:
        return self.scalar * self.table

    def with_(self, **kw):
        return replace(self, **kw)

    def to_json(self) -> dict:
        flat = self.table.ravel()
        return {"parent": self.parent.to_json(), "o": self.o,
                "scalar": [complex(self.scalar).real, complex(self.scalar).imag],
                "re": flat.real.tolist(), "im": flat.imag.tolist()}


@dataclass(frozen=True, eq=False)
class DistC2(SchwartzC2):
    """Kernel ``G``: ``<f, G> = c c' sum_x f(x) G(x)`` on a common box."""


# ---------------------------------------------------------------------------
# tensor plumbing


def _embed(table: np.ndarray, old_cells, new_cells, fill) -> np.ndarray:
    """Tensor ``table`` with ``fill(cell)`` on new cells, in ``new_cells`` order."""
    pos = {c: k for k, c in enumerate(old_cells)}
    extra = [c for c in new_cells if c not in pos]
    t = table
    for c in extra:
        t = np.multiply.outer(t, fill(c))
    order = list(old_cells) + extra
    where = {c: k for k, c in enumerate(order)}
    return np.transpose(t, [where[c] for c in new_cells]) if t.ndim else t


def _drop(table: np.ndarray, cells, drop: dict, exact: bool, q: int) -> np.ndarray:
    """Remove cells; ``drop[cell]`` is ``'slice'``, ``'sum'`` or ``'msum'``.

    With ``exact`` the element must already be ``delta_0`` (``'slice'``)
    or constant (``'sum'``/``'msum'``) along the removed cells.
    """
    t = table
    for k in range(len(cells) - 1, -1, -1):
        c = cells[k]
        how = drop.get(c)
        if how is None:
            continue
        if how == "slice":
            if exact:
                rest = np.delete(t, 0, axis=k)
                if rest.size and np.max(np.abs(rest)) > 1e-12 * max(1.0, np.max(np.abs(t))):
                    raise ValueError(f"element is not supported at 0 along cell {c}")
            t = np.take(t, 0, axis=k)
        elif how == "const":
            first = np.take(t, [0], axis=k)
            if np.max(np.abs(t - first), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(t), initial=0.0)):
                raise ValueError(f"element is not constant along cell {c}")
            t = np.take(t, 0, axis=k)
        elif how == "sum":
            t = np.sum(t, axis=k)
        elif how == "msum":
            t = np.sum(t, axis=k) * mass(c[0], q)
        elif how == "mdiv":
            # inverse of tensoring with the mass vector
            first = np.take(t, [0], axis=k)
            if np.max(np.abs(t - first), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(t), initial=0.0)):
                raise ValueError(f"element is not a Haar kernel along cell {c}")
            t = np.take(t, 0, axis=k) / mass(c[0], q)
        else:
            raise ValueError(how)
    return t


def _reframe_rows(x: SchwartzC2, b0: int, b1: int) -> SchwartzC2:
    P, q, old = x.parent, x.parent.q, x.parent.box
    dist = isinstance(x, DistC2)
    new = P.with_box(Box(old.a0, old.a1, b0, b1))
    if new.order > DENSE_LIMIT:
        raise ValueError("reframed table would be too large for the dense form")
    drop = {}
    for a, b in P.cells:
        if b < b0:
            drop[(a, b)] = "slice"
        elif b > b1:
            drop[(a, b)] = "mdiv" if dist else "msum"
    t = _drop(x.table, P.cells, drop, exact=dist, q=q)
    kept = [c for c in P.cells if c not in drop]
    if dist:
        t = _embed(t, kept, new.cells,
                   lambda c: _delta0(q) if c[1] < old.b0 else np.full(q, mass(c[0], q), dtype=complex))
    elif len(kept) != len(new.cells):
        raise ValueError("functions cannot be extended to new outer rows")
    return type(x)(new, t, x.scalar, x.o)


def _reframe_cols(x: SchwartzC2, a0: int, a1: int) -> SchwartzC2:
    P, q, old = x.parent, x.parent.q, x.parent.box
    dist = isinstance(x, DistC2)
    new = P.with_box(Box(a0, a1, old.b0, old.b1))
    if new.order > DENSE_LIMIT:
        raise ValueError("reframed table would be too large for the dense form")
    drop = {}
    for a, b in P.cells:
        if a < a0:
            drop[(a, b)] = "slice"
        elif a > a1:
            drop[(a, b)] = "sum" if dist else "const"
    t = _drop(x.table, P.cells, drop, exact=not dist, q=q)
    kept = [c for c in P.cells if c not in drop]
    if not dist:
        t = _embed(t, kept, new.cells,
                   lambda c: _delta0(q) if c[0] < old.a0 else np.ones(q, dtype=complex))
    elif len(kept) != len(new.cells):
        raise ValueError("distributions cannot be extended to new inner cells")
    return type(x)(new, t, x.scalar, x.o)


def reframe(x: SchwartzC2, box: Box) -> SchwartzC2:
    """Present ``x`` on another box (see the module table for exactness)."""
    if box == x.parent.box:
        return x
    _check_box(box)
    if isinstance(x, DistC2):
        return _reframe_rows(_reframe_cols(x, box.a0, box.a1), box.b0, box.b1)
    return _reframe_cols(_reframe_rows(x, box.b0, box.b1), box.a0, box.a1)


def _common_box(f: SchwartzC2, G: DistC2) -> Box:
    fb, gb = f.parent.box, G.parent.box
    a0, a1 = (fb.a0, fb.a1) if gb.a0 <= fb.a0 and fb.a1 <= gb.a1 else (max(fb.a0, gb.a0), min(fb.a1, gb.a1))
    b0, b1 = (fb.b0, fb.b1) if fb.b0 <= gb.b0 and gb.b1 <= fb.b1 else (max(fb.b0, gb.b0), min(fb.b1, gb.b1))
    return Box(a0, a1, b0, b1)


def pairing2(f: SchwartzC2, G: DistC2) -> complex:
    if isinstance(f, DistC2) or not isinstance(G, DistC2):
        raise TypeError("pairing2 takes a function and a distribution")
    if f.parent.core != G.parent.core:
        raise ValueError("pairing across different objects")
    if f.o != G.o:
        raise ValueError("function and distribution use different base levels")
    box = _common_box(f, G)
    f2, G2 = reframe(f, box), reframe(G, box)
    return complex(f2.scalar * G2.scalar * np.sum(f2.table * G2.table))


def rebase(x: SchwartzC2, o1: int, m: VirtualMeasure | None = None) -> SchwartzC2:
    """``S_F(o) (x) mu(F(o)|F(o1)) -> S_F(o1)`` for functions and the
    matching map for distributions (``m`` in ``mu(F(o1)|F(o))``).

    The default ``m`` is the canonical unit measure on cf-objects and the
    reference otherwise.
    """
    P = x.parent
    dist = isinstance(x, DistC2)
    i, j = (o1, x.o) if dist else (x.o, o1)
    if m is None:
        if predicates2(P)["cf"]:
            m = canonical_one(P, i, j)
        else:
            m = VirtualMeasure(P, i, j, 1.0)
    if m.core != P.core or (m.i, m.j) != (i, j):
        raise ValueError(f"rebase needs a measure in mu(F({i})|F({j}))")
    return x.with_(scalar=x.scalar * m.scalar, o=o1)


def deviation(x: SchwartzC2, y: SchwartzC2) -> float:
    """Max entry deviation after moving ``y`` to ``x``'s box."""
    if type(x) is not type(y) or x.parent.core != y.parent.core or x.o != y.o:
        raise ValueError("elements are not comparable")
    y = reframe(y, x.parent.box)
    d = x.values - y.values
    return float(np.max(np.abs(d))) if d.size else abs(complex(d))


# ---------------------------------------------------------------------------
# Fourier transform


def _cell_masses(P: FilteredObject2) -> float:
    return float(np.prod([mass(a, P.q) for a, _ in P.cells]))


def _transform(t: np.ndarray) -> np.ndarray:
    out = np.fft.fftn(t) if t.ndim else t.copy()
    # dual cells are the reflected cells in reversed order
    return np.transpose(out, tuple(range(t.ndim - 1, -1, -1))) if t.ndim else out


def fourier2(f: SchwartzC2) -> SchwartzC2:
    """``(F f)(y) = sum_x f(x) conj psi(<x, y>) prod m(a_x)``, ``o -> -o``."""
    if not isinstance(f.parent, FilteredObject2) or isinstance(f, DistC2):
        raise TypeError("fourier2 takes a function on a region object")
    P = f.parent
    return SchwartzC2(dual2(P), _transform(f.table) * _cell_masses(P), f.scalar, -f.o)


def fourier2_dist(G: DistC2) -> DistC2:
    """Transpose of ``fourier2``: ``<F f, G> = <f, F G>``."""
    if not isinstance(G, DistC2):
        raise TypeError("fourier2_dist takes a distribution")
    Q = dual2(G.parent)
    return DistC2(Q, _transform(G.table) * _cell_masses(Q), G.scalar, -G.o)


def check(x: SchwartzC2) -> SchwartzC2:
    """``x -> x(-.)``."""
    return x.with_(table=reflect(x.table))


# ---------------------------------------------------------------------------
# factored elements for large boxes


@dataclass(frozen=True, eq=False)
class FactoredC2:
    """``scalar * sum_r coeffs[r] * prod_cells factors[r, cell, :]``."""

    parent: FilteredObject2
    factors: np.ndarray
    coeffs: np.ndarray
    scalar: complex = 1.0
    o: int = 0
    dist: bool = False

    def __post_init__(self):
        _check_box(self.parent.box)
        F = np.asarray(self.factors, dtype=complex)
        n = len(self.parent.cells)
        if F.ndim != 3 or F.shape[1:] != (n, self.parent.q):
            raise ValueError("factors must have shape (terms, cells, q)")
        object.__setattr__(self, "factors", F)
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "scalar", complex(self.scalar))

    def dense(self) -> SchwartzC2:
        t = 0
        for c, fac in zip(self.coeffs, self.factors):
            term = np.array(c)
            for v in fac:
                term = np.multiply.outer(term, v)
            t = t + term
        cls = DistC2 if self.dist else SchwartzC2
        return cls(self.parent, t, self.scalar, self.o)


def fourier2_factored(x: FactoredC2) -> FactoredC2:
    """Per-cell transforms; the dual cell order is reversed."""
    P = x.parent
    Q = dual2(P)
    F = np.fft.fft(x.factors, axis=2)
    if x.dist:
        w = np.array([mass(a, P.q) for a, _ in Q.cells])[::-1]
    else:
        w = np.array([mass(a, P.q) for a, _ in P.cells])
    F = F * w[None, :, None]
    return FactoredC2(Q, F[:, ::-1, :], x.coeffs, x.scalar, -x.o, x.dist)


def check_factored(x: FactoredC2) -> FactoredC2:
    return replace(x, factors=np.roll(x.factors[:, :, ::-1], 1, axis=2))


def pairing2_factored(f: FactoredC2, G: FactoredC2) -> complex:
    if f.dist or not G.dist or f.parent != G.parent or f.o != G.o:
        raise ValueError("pairing needs a function and a distribution on the same box")
    inner = np.einsum("rcq,scq->rsc", f.factors, G.factors)
    return complex(f.scalar * G.scalar * np.einsum("r,s,rs->", f.coeffs, G.coeffs, np.prod(inner, axis=2)))


def factored_deviation_bound(x: FactoredC2, y: FactoredC2) -> float:
    """Upper bound on the max entry deviation of two factored elements with
    matching terms, by telescoping ``prod a_k - prod b_k`` cell by cell."""
    if x.factors.shape != y.factors.shape or x.parent != y.parent:
        raise ValueError("factored elements have different shapes")
    total = 0.0
    for r in range(x.factors.shape[0]):
        a = x.scalar * x.coeffs[r] * x.factors[r]
        b = y.scalar * y.coeffs[r] * y.factors[r]
        # move the coefficient into the first cell
        a = a.copy()
        b = b.copy()
        if len(a) == 0:
            total += abs(complex(x.scalar * x.coeffs[r] - y.scalar * y.coeffs[r]))
            continue
        a[1:] /= x.scalar * x.coeffs[r]
        b[1:] /= y.scalar * y.coeffs[r]
        na = np.max(np.abs(a), axis=1)
        nb = np.max(np.abs(b), axis=1)
        diff = np.max(np.abs(a - b), axis=1)
        for k in range(len(a)):
            total += float(np.prod(nb[:k]) * diff[k] * np.prod(na[k + 1:]))
    return total


def random_factored(rng, parent: FilteredObject2, terms: int = 3, dist: bool = False) -> FactoredC2:
    n, q = len(parent.cells), parent.q
    F = rng.normal(size=(terms, n, q)) + 1j * rng.normal(size=(terms, n, q))
    F /= np.max(np.abs(F), axis=2, keepdims=True)
    c = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return FactoredC2(parent, F, c, 1.0, int(rng.integers(-2, 3)), dist)


# ---------------------------------------------------------------------------
# direct and inverse images


FUNCTION_MODES = {
    "beta_lower": ("E2", "E3", "c", "mu"),
    "alpha_upper": ("E2", "E1", "d", "nu"),
    "beta_upper": ("E3", "E2", "cf", None),
    "alpha_lower": ("E1", "E2", "df", None),
}
DIST_MODES = {
    "beta_upper": ("E3", "E2", "c", "mu"),
    "alpha_lower": ("E1", "E2", "d", "nu"),
    "beta_lower": ("E2", "E3", "cf", None),
    "alpha_upper": ("E2", "E1", "df", None),
}
ADJOINT = {"beta_lower": "beta_upper", "alpha_upper": "alpha_lower",
           "beta_upper": "beta_lower", "alpha_lower": "alpha_upper"}


def _hyp_object(T: AdmissibleTriple2, hyp: str) -> tuple[str, FilteredObject2]:
    return ("E1", T.E1) if hyp in ("c", "cf") else ("E3", T.E3)


def _validate_measure(T, hyp, m, o):
    name, E = _hyp_object(T, hyp)
    if m is None:
        raise ValueError(f"mode needs a measure on {name}")
    if m.core != E.core:
        raise ValueError(f"measure does not live on {name}")
    want = top_level(E) if hyp == "c" else bottom_level(E)
    if (m.i, m.j) != (o, want):
        raise ValueError(f"measure must lie in mu(F({o})|F({want})) of {name}")


def _check_coverage(T: AdmissibleTriple2, hyp: str):
    bx, R1, R3 = T.E2.box, T.E1.region, T.E3.region
    if hyp == "c" and R1.b_min < bx.b0:
        raise ValueError("box does not reach the top of E1")
    if hyp == "d" and R3.b_max > bx.b1:
        raise ValueError("box does not reach the bottom of E3")
    rows = range(bx.b0, bx.b1 + 1)
    if hyp == "cf" and any(R1.row_a_min(b) < bx.a0 for b in rows):
        raise ValueError("box u-range misses part of the compact rows of E1")
    if hyp == "df" and any(R3.row_a_max(b) > bx.a1 for b in rows):
        raise ValueError("box u-range misses part of the discrete rows of E3")


def _split_perm(T: AdmissibleTriple2):
    """Axes of ``E2`` reordered as (E1 cells, E3 cells) and back."""
    order = list(T.sub_axes) + list(T.quot_axes)
    inv = np.argsort(order)
    return order, inv


def image2(T: AdmissibleTriple2, x: SchwartzC2, mode: str, measure: VirtualMeasure | None = None):
    """Direct and inverse images along the triple.

    Functions: ``beta_lower`` (integrate along E1, needs E1 c and ``mu``),
    ``alpha_upper`` (restrict to E1, needs E3 d and ``nu``),
    ``beta_upper`` (pull back, E1 cf), ``alpha_lower`` (extend by zero,
    E3 df).  Distributions use the same names for the transposes.
    """
    dist = isinstance(x, DistC2)
    table = DIST_MODES if dist else FUNCTION_MODES
    if mode not in table:
        raise ValueError(f"unknown mode {mode!r}")
    src, tgt, hyp, mname = table[mode]
    name, E = _hyp_object(T, hyp)
    if not predicates2(E)[hyp]:
        raise ValueError(f"{mode} needs {name} to be a {hyp}-object")
    S = getattr(T, src)
    if x.parent.core != S.core:
        raise ValueError(f"element must live on {src}")
    x = reframe(x, T.E2.box)
    _check_coverage(T, hyp)
    q, o = T.E2.q, x.o
    if mname:
        _validate_measure(T, hyp, measure, o)
    n1, n3 = len(T.E1.cells), len(T.E3.cells)
    order, inv = _split_perm(T)
    m1 = np.array([mass(a, q) for a, _ in T.E1.cells])

    def ones_like(n, vec=None):
        out = np.array(1.0 + 0j)
        for k in range(n):
            out = np.multiply.outer(out, vec[k] if vec is not None else np.ones(q))
        return out

    def delta(n):
        out = np.array(1.0 + 0j)
        for _ in range(n):
            out = np.multiply.outer(out, _delta0(q))
        return out

    def mvecs():
        return [np.full(q, m, dtype=complex) for m in m1]

    if src == "E2":
        t2 = np.transpose(x.table, order) if x.table.ndim else x.table
        t2 = t2.reshape((q ** n1, q ** n3))
        if tgt == "E3":
            if dist:      # counting sum over E1
                t, s = t2.sum(axis=0), x.scalar * canonical_one(T.E1, T.E2.box.lo, o).scalar
            else:         # integrate over E1
                w = ones_like(n1, mvecs()).reshape(-1)
                t, s = w @ t2, x.scalar * measure.scalar
        else:
            t = t2[:, 0]
            s = x.scalar * (canonical_delta(T.E3, T.E2.box.lo, o).scalar if dist else measure.scalar)
        out = getattr(T, tgt)
        return (DistC2 if dist else SchwartzC2)(out, t.reshape(out.shape), s, o)

    t = x.table.reshape(-1)
    if src == "E3":
        if dist:
            w = ones_like(n1, mvecs()).reshape(-1)
            s = x.scalar * measure.scalar
        else:
            w = np.ones(q ** n1, dtype=complex)
            s = x.scalar * canonical_one(T.E1, T.E2.box.lo, o).scalar
        t2 = np.outer(w, t)
    else:
        t2 = np.outer(t, delta(n3).reshape(-1))
        s = x.scalar * (measure.scalar if dist else canonical_delta(T.E3, T.E2.box.lo, o).scalar)
    t2 = t2.reshape((q,) * (n1 + n3))
    if t2.ndim:
        t2 = np.transpose(t2, inv)
    return (DistC2 if dist else SchwartzC2)(T.E2, t2, s, o)


# ---------------------------------------------------------------------------
# characteristic elements and Poisson formulas


def haar_kernel(E: FilteredObject2, mu: VirtualMeasure) -> DistC2:
    """The Haar measure ``mu`` of a c-object as a distribution."""
    t = np.array(1.0 + 0j)
    for a, _ in E.cells:
        t = np.multiply.outer(t, np.full(E.q, mass(a, E.q), dtype=complex))
    return DistC2(E, t, mu.scalar, mu.i)


def dirac(E: FilteredObject2, nu: VirtualMeasure) -> DistC2:
    """Dirac at 0 with the measure ``nu`` of a d-object."""
    t = np.array(1.0 + 0j)
    for _ in E.cells:
        t = np.multiply.outer(t, _delta0(E.q))
    return DistC2(E, t, nu.scalar, nu.i)


def characteristic_delta(T: AdmissibleTriple2, mu: VirtualMeasure, nu: VirtualMeasure, route: str = "alpha"):
    """``alpha_*(haar_mu (x) nu)``; ``route='beta'`` gives ``beta^*(delta_nu (x) mu)``."""
    if route == "alpha":
        return image2(T, haar_kernel(T.E1, mu), "alpha_lower", nu)
    return image2(T, dirac(T.E3, nu), "beta_upper", mu)


def unit_function(E: FilteredObject2, o: int) -> SchwartzC2:
    """``1`` on a cf-object (canonical unit measure)."""
    return SchwartzC2(E, np.ones(E.shape), canonical_one(E, E.box.lo, o).scalar, o)


def delta_function(E: FilteredObject2, o: int) -> SchwartzC2:
    """``delta_0`` on a df-object (counting measure)."""
    t = np.zeros(E.shape, dtype=complex)
    t[(0,) * len(E.cells)] = 1.0
    return SchwartzC2(E, t, canonical_delta(E, E.box.lo, o).scalar, o)


def characteristic_delta_cf(T: AdmissibleTriple2, o: int, route: str = "alpha") -> SchwartzC2:
    """``alpha_*(1)``; ``route='beta'`` gives ``beta^*(delta_0)``."""
    if route == "alpha":
        return image2(T, unit_function(T.E1, o), "alpha_lower")
    return image2(T, delta_function(T.E3, o), "beta_upper")


def _report(name, dev, hyp, probes, **extra) -> dict:
    return {"identity": name, "hypotheses": hyp, "max_deviation": float(dev), "probe_count": int(probes),
            "passed": bool(dev <= 1e-9), **extra}


def poisson2_I_check(T: AdmissibleTriple2, mu: VirtualMeasure, nu: VirtualMeasure) -> dict:
    """``F(delta_{E1, mu nu}) = delta_{E3^, nu mu}`` and the two-route lemma."""
    lhs = characteristic_delta(T, mu, nu)
    lem = deviation(lhs, characteristic_delta(T, mu, nu, route="beta"))
    D = T.dual()
    rhs = characteristic_delta(D, dual_transport(nu), dual_transport(mu))
    dev = deviation(fourier2_dist(lhs), rhs)
    hyp = {"E1_c": predicates2(T.E1)["c"], "E3_d": predicates2(T.E3)["d"]}
    return _report("poisson_I", max(dev, lem), hyp, lhs.table.size, fourier_deviation=dev,
                   lemma_deviation=lem)


def poisson2_II_check(T: AdmissibleTriple2, o: int) -> dict:
    """``F(delta_{E1}) = delta_{E3^}`` for E1 cf and E3 df."""
    lhs = characteristic_delta_cf(T, o)
    lem = deviation(lhs, characteristic_delta_cf(T, o, route="beta"))
    rhs = characteristic_delta_cf(T.dual(), -o)
    dev = deviation(fourier2(lhs), rhs)
    hyp = {"E1_cf": predicates2(T.E1)["cf"], "E3_df": predicates2(T.E3)["df"]}
    return _report("poisson_II", max(dev, lem), hyp, lhs.table.size, fourier_deviation=dev,
                   lemma_deviation=lem)


# ---------------------------------------------------------------------------
# base change and composition identities


def _rand_table(rng, E: FilteredObject2) -> np.ndarray:
    return rng.normal(size=E.shape) + 1j * rng.normal(size=E.shape)


def _rand_scalar(rng) -> float:
    return float(np.exp(rng.normal()))


def _R(**kw) -> Region:
    return Region.rect(**kw)


# per identity: hypotheses, sub-regions (in the full plane) and the box
_SQUARES = {
    1: ("E1 c, B d", _R(b0=1), _R(a0=0, b1=0)),
    3: ("E1 cf, B df", _R(a0=0), _R(a0=-1, a1=-1)),
    5: ("E1 c, B df", _R(b0=1), _R(a0=0, b1=0)),
    7: ("E1 cf, B d", _R(a0=0), _R(a1=-1, b0=1)),
    9: ("E1 c, D c", _R(b0=1), _R(b0=-1, b1=0)),
    11: ("E1 cf, D cf", _R(a0=1), _R(a0=0, a1=0)),
}
_AMALGAMS = {
    13: ("E3 d, L' d", _R(b0=-1), _R(b0=1)),
    15: ("E3 df, L' df", _R(a0=-1), _R(a0=1)),
}
DEFAULT_BOX = Box(-2, 1, -2, 1)

BASE_CHANGE_IDENTITIES = (
    "base_change_sum_restrict", "base_change_sum_restrict_dist",
    "base_change_extend_inflate", "base_change_extend_inflate_dist",
    "base_change_extend_sum", "base_change_restrict_inflate_dist",
    "base_change_restrict_inflate", "base_change_extend_sum_dist",
    "compose_fiber_sums", "compose_fiber_sums_dist",
    "compose_inflations", "compose_inflations_dist",
    "compose_restrictions", "compose_restrictions_dist",
    "compose_extensions", "compose_extensions_dist",
)


def base_change_square(q: int, k: int, box: Box = DEFAULT_BOX) -> dict:
    """The four triples of the base-change square used for identity ``k``."""
    key = k if k % 2 else k - 1
    if key in _SQUARES:
        _, sub, dsub = _SQUARES[key]
        E2 = FilteredObject2(q, Region.plane(), box)
        T = AdmissibleTriple2.split(E2, sub)
        D = FilteredObject2(q, T.E3.region & dsub, box)
        return fibered_product2(T, D)[1]
    _, e2, e1 = _AMALGAMS[key]
    H = FilteredObject2(q, Region.plane(), box)
    E2 = FilteredObject2(q, e2, box)
    T = AdmissibleTriple2.split(E2, e1)
    return amalgam2(T, H)[1]


def _mu(E, o, s):
    return VirtualMeasure(E, o, top_level(E), s)


def _nu(E, o, s):
    return VirtualMeasure(E, o, bottom_level(E), s)


def _product_measure(X, m1, m2, kind):
    lvl = top_level(X) if kind == "c" else bottom_level(X)
    return VirtualMeasure(X, m1.i, lvl, m1.scalar * m2.scalar)


def base_change2_check(k: int, q: int = 2, rng=None, box: Box = DEFAULT_BOX) -> dict:
    """Evaluate both sides of base-change/composition identity ``k`` (1..16)."""
    rng = np.random.default_rng(rng)
    if not 1 <= k <= 16:
        raise ValueError("identities are numbered 1..16")
    sq = base_change_square(q, k, box)
    o = int(rng.integers(-2, 3))
    s1, s2 = _rand_scalar(rng), _rand_scalar(rng)
    im = image2

    def fn(E):
        return SchwartzC2(E, _rand_table(rng, E), _rand_scalar(rng), o)

    def ds(E):
        return DistC2(E, _rand_table(rng, E), _rand_scalar(rng), o)

    if k <= 12:
        main, top, left, right = sq["main"], sq["top"], sq["left"], sq["right"]
        E1, E3, D, B, X = main.E1, main.E3, right.E1, right.E3, left.E1
        hyp = {"E1": predicates2(E1), "D": predicates2(D), "B": predicates2(B)}
        if k in (1, 2, 5, 6, 9, 10):
            mu = _mu(E1, o, s1)
        if k in (1, 2, 7, 8):
            nu = _nu(B, o, s2)
        if k == 1:
            f = fn(main.E2)
            lhs = im(right, im(main, f, "beta_lower", mu), "alpha_upper", nu)
            rhs = im(top, im(left, f, "alpha_upper", nu), "beta_lower", mu)
        elif k == 2:
            G = ds(D)
            lhs = im(main, im(right, G, "alpha_lower", nu), "beta_upper", mu)
            rhs = im(left, im(top, G, "beta_upper", mu), "alpha_lower", nu)
        elif k == 3:
            f = fn(D)
            lhs = im(main, im(right, f, "alpha_lower"), "beta_upper")
            rhs = im(left, im(top, f, "beta_upper"), "alpha_lower")
        elif k == 4:
            G = ds(main.E2)
            lhs = im(right, im(main, G, "beta_lower"), "alpha_upper")
            rhs = im(top, im(left, G, "alpha_upper"), "beta_lower")
        elif k == 5:
            f = fn(X)
            lhs = im(main, im(left, f, "alpha_lower"), "beta_lower", mu)
            rhs = im(right, im(top, f, "beta_lower", mu), "alpha_lower")
        elif k == 6:
            G = ds(E3)
            lhs = im(top, im(right, G, "alpha_upper"), "beta_upper", mu)
            rhs = im(left, im(main, G, "beta_upper", mu), "alpha_upper")
        elif k == 7:
            f = fn(E3)
            lhs = im(top, im(right, f, "alpha_upper", nu), "beta_upper")
            rhs = im(left, im(main, f, "beta_upper"), "alpha_upper", nu)
        elif k == 8:
            G = ds(X)
            lhs = im(main, im(left, G, "alpha_lower", nu), "beta_lower")
            rhs = im(right, im(top, G, "beta_lower"), "alpha_lower", nu)
        elif k in (9, 10):
            nuD = _mu(D, o, s2)
            both = _product_measure(X, mu, nuD, "c")
            if k == 9:
                f = fn(main.E2)
                lhs = im(left, f, "beta_lower", both)
                rhs = im(right, im(main, f, "beta_lower", mu), "beta_lower", nuD)
            else:
                G = ds(B)
                lhs = im(left, G, "beta_upper", both)
                rhs = im(main, im(right, G, "beta_upper", nuD), "beta_upper", mu)
        elif k == 11:
            f = fn(B)
            lhs = im(left, f, "beta_upper")
            rhs = im(main, im(right, f, "beta_upper"), "beta_upper")
        else:
            G = ds(main.E2)
            lhs = im(left, G, "beta_lower")
            rhs = im(right, im(main, G, "beta_lower"), "beta_lower")
    else:
        main, outer, upper = sq["main"], sq["outer"], sq["upper"]
        E1, E3, L, M = main.E1, main.E3, upper.E3, outer.E3
        hyp = {"E3": predicates2(E3), "L'": predicates2(L)}
        if k in (13, 14):
            mu, nu = _nu(E3, o, s1), _nu(L, o, s2)
            both = _product_measure(M, mu, nu, "d")
        if k == 13:
            f = fn(outer.E2)
            lhs = im(outer, f, "alpha_upper", both)
            rhs = im(main, im(upper, f, "alpha_upper", nu), "alpha_upper", mu)
        elif k == 14:
            G = ds(E1)
            lhs = im(outer, G, "alpha_lower", both)
            rhs = im(upper, im(main, G, "alpha_lower", mu), "alpha_lower", nu)
        elif k == 15:
            f = fn(E1)
            lhs = im(outer, f, "alpha_lower")
            rhs = im(upper, im(main, f, "alpha_lower"), "alpha_lower")
        else:
            G = ds(outer.E2)
            lhs = im(outer, G, "alpha_upper")
            rhs = im(main, im(upper, G, "alpha_upper"), "alpha_upper")
    dev = deviation(lhs, rhs)
    scale = float(np.max(np.abs(lhs.values))) if lhs.table.size else 0.0
    return _report(BASE_CHANGE_IDENTITIES[k - 1], dev, hyp, lhs.table.size, index=k, scale=scale)


# ---------------------------------------------------------------------------
# Fourier transform against images


def fourier_image_check(T: AdmissibleTriple2, square: int, rng=None) -> dict:
    """One of the eight Fourier/image squares on ``T`` (``square`` in 1..8)."""
    rng = np.random.default_rng(rng)
    o = int(rng.integers(-2, 3))
    D = T.dual()

    def fn(E):
        return SchwartzC2(E, _rand_table(rng, E), _rand_scalar(rng), o)

    def ds(E):
        return DistC2(E, _rand_table(rng, E), _rand_scalar(rng), o)

    F, Fd = fourier2, fourier2_dist
    if square in (1, 3):
        mu = _mu(T.E1, o, _rand_scalar(rng))
        mu_d = dual_transport(mu)
    if square in (2, 4):
        nu = _nu(T.E3, o, _rand_scalar(rng))
        nu_d = dual_transport(nu)
    if square == 1:
        f = fn(T.E2)
        lhs, rhs = F(image2(T, f, "beta_lower", mu)), image2(D, F(f), "alpha_upper", mu_d)
    elif square == 2:
        f = fn(T.E2)
        lhs, rhs = F(image2(T, f, "alpha_upper", nu)), image2(D, F(f), "beta_lower", nu_d)
    elif square == 3:
        G = ds(T.E3)
        lhs, rhs = Fd(image2(T, G, "beta_upper", mu)), image2(D, Fd(G), "alpha_lower", mu_d)
    elif square == 4:
        G = ds(T.E1)
        lhs, rhs = Fd(image2(T, G, "alpha_lower", nu)), image2(D, Fd(G), "beta_upper", nu_d)
    elif square == 5:
        f = fn(T.E3)
        lhs, rhs = F(image2(T, f, "beta_upper")), image2(D, F(f), "alpha_lower")
    elif square == 6:
        f = fn(T.E1)
        lhs, rhs = F(image2(T, f, "alpha_lower")), image2(D, F(f), "beta_upper")
    elif square == 7:
        G = ds(T.E2)
        lhs, rhs = Fd(image2(T, G, "beta_lower")), image2(D, Fd(G), "alpha_upper")
    elif square == 8:
        G = ds(T.E2)
        lhs, rhs = Fd(image2(T, G, "alpha_upper")), image2(D, Fd(G), "beta_lower")
    else:
        raise ValueError("squares are numbered 1..8")
    return _report(f"fourier_square_{square}", deviation(lhs, rhs), {}, lhs.table.size)


def adjointness_check(T: AdmissibleTriple2, mode: str, rng=None) -> dict:
    """``<image(f), G> = <f, image^t(G)>`` for one function mode."""
    rng = np.random.default_rng(rng)
    o = int(rng.integers(-2, 3))
    src, tgt, hyp, mname = FUNCTION_MODES[mode]
    m = None
    if mname == "mu":
        m = _mu(T.E1, o, _rand_scalar(rng))
    elif mname == "nu":
        m = _nu(T.E3, o, _rand_scalar(rng))
    S, Tg = getattr(T, src), getattr(T, tgt)
    f = SchwartzC2(S, _rand_table(rng, S), _rand_scalar(rng), o)
    G = DistC2(Tg, _rand_table(rng, Tg), _rand_scalar(rng), o)
    lhs = pairing2(image2(T, f, mode, m), G)
    rhs = pairing2(f, image2(T, G, ADJOINT[mode], m))
    return _report(f"adjoint_{mode}", abs(lhs - rhs), {}, 1, lhs=[lhs.real, lhs.imag])


def fourier2_check(q: int, box: Box, rng=None, terms: int = 3) -> dict:
    """``F F f = f(-.)`` and ``<F f, G> = <f, F G>`` on the full-plane box."""
    rng = np.random.default_rng(rng)
    P = FilteredObject2(q, Region.plane(), box)
    Q = dual2(P)
    if P.order <= 1 << 16:
        f = SchwartzC2(P, _rand_table(rng, P), _rand_scalar(rng), int(rng.integers(-2, 3)))
        G = DistC2(Q, _rand_table(rng, Q), _rand_scalar(rng), -f.o)
        inv = deviation(fourier2(fourier2(f)), check(f))
        adj = abs(pairing2(fourier2(f), G) - pairing2(f, fourier2_dist(G)))
        route = "dense"
    else:
        f = random_factored(rng, P, terms)
        G = random_factored(rng, Q, terms, dist=True)
        G = replace(G, o=-f.o)
        inv = factored_deviation_bound(fourier2_factored(fourier2_factored(f)), check_factored(f))
        adj = abs(pairing2_factored(fourier2_factored(f), G)
                  - pairing2_factored(f, fourier2_factored(G)))
        route = "factored"
    return _report("fourier2", max(inv, adj), {}, P.order, inversion=inv, adjoint=adj, route=route,
                   box=[box.a0, box.a1, box.b0, box.b1], q=q)


def poisson2_reduction_check(q: int) -> dict:
    """Poisson I on a one-cell box against the finite group formula."""
    from .finabel import AdmissibleTripleC0, FinAbGroup, MeasureC0, Subgroup, poisson_c0_check

    box = Box(0, 0, 0, 0)
    E2 = FilteredObject2(q, Region.plane(), box)
    T = AdmissibleTriple2.split(E2, Region.rect(b0=0, b1=0, a0=0, a1=0) | Region.rect(b0=1))
    o = 0
    mu, nu = _mu(T.E1, o, 1.0), _nu(T.E3, o, 1.0)
    two = poisson2_I_check(T, mu, nu)
    G = FinAbGroup((q,))
    T0 = AdmissibleTripleC0.from_subgroup(G, Subgroup.whole(G))
    one = poisson_c0_check(T0, MeasureC0(T0.G1, 1.0 / q), MeasureC0(T0.G3.dual(), 1.0))
    # both sides are the Dirac mass at 0 with weight 1
    fin = one["lhs"].values.ravel()
    tw = fourier2_dist(characteristic_delta(T, mu, nu)).values.ravel()
    dev = float(np.max(np.abs(fin - tw)))
    return _report("poisson_reduction", max(dev, two["max_deviation"]), {}, q, finite=fin.tolist())
