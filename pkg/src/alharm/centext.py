"""Central extension of filtration-preserving automorphisms by scalars.

An element is a pair ``(g, mu)`` with ``mu`` in ``mu(F(o)|g F(o))``.  The
group law is ``(g1, m1)(g2, m2) = (g1 g2, m1 (x) l_g1(m2))`` and the
kernel of ``(g, mu) -> g`` is the scalar line.  Both actions below move
the presentation box along with ``g``, so no data is ever lost or wrapped
around; boxes that would leave ``a0 <= 0 <= a1 + 1`` are rejected.

Only monomial automorphisms and exponent permutations act on tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .filt2 import AdmissibleTriple2, Automorphism2, FilteredObject2, check_aut
from .harm2 import (DistC2, SchwartzC2, characteristic_delta, deviation, fourier2, fourier2_dist,
                    predicates2)
from .vmeas import VirtualMeasure, compose_gamma, dual_transport, invert, lg_ratio, transport_lg


def _normalized(g: Automorphism2, q: int) -> Automorphism2:
    return Automorphism2(g.alpha, g.beta, g.scalar % q, g.unit, g.perm, g.order)


@dataclass(frozen=True)
class CentralExtElement:
    g: Automorphism2
    mu: VirtualMeasure

    @property
    def parent(self) -> FilteredObject2:
        return self.mu.parent

    @property
    def o(self) -> int:
        return self.mu.i

    def key(self):
        """Exact identity of the element."""
        return (_normalized(self.g, self.parent.q), self.mu.core, self.mu.i, self.mu.j, self.mu.scalar)


def lift(g: Automorphism2, E: FilteredObject2, o: int, scalar=1) -> CentralExtElement:
    """``(g, scalar * ref)`` with the reference in ``mu(F(o)|F(o - beta))``."""
    rep = check_aut(g, E)
    if not rep["aut_prime"]:
        raise ValueError(f"not a filtration automorphism: {rep['witness']}")
    return CentralExtElement(_normalized(g, E.q), VirtualMeasure(E, o, o - g.beta, scalar))


def identity(E: FilteredObject2, o: int) -> CentralExtElement:
    return CentralExtElement(Automorphism2(), VirtualMeasure(E, o, o, Fraction(1)))


def _with_core(m: VirtualMeasure, E: FilteredObject2) -> VirtualMeasure:
    return VirtualMeasure(E, m.i, m.j, m.scalar)


def mul(x: CentralExtElement, y: CentralExtElement) -> CentralExtElement:
    E, q = x.parent, x.parent.q
    if x.mu.core != y.mu.core or x.o != y.o:
        raise ValueError("elements act on different objects or base levels")
    moved = _with_core(transport_lg(x.g, y.mu), E)
    return CentralExtElement(x.g.compose(y.g, q), compose_gamma(x.mu, moved))


def inv(x: CentralExtElement) -> CentralExtElement:
    E, q = x.parent, x.parent.q
    gi = _normalized(x.g.inverse(q), q)
    return CentralExtElement(gi, _with_core(transport_lg(gi, invert(x.mu)), E))


def scalar_of(x: CentralExtElement):
    """The scalar of an element over the identity automorphism."""
    g = x.g
    if g.alpha or g.beta or g.unit or g.perm or g.scalar % x.parent.q != 1:
        raise ValueError("element does not lie over the identity")
    return x.mu.scalar


def commutator(x: CentralExtElement, y: CentralExtElement):
    """``x y x^-1 y^-1``; a scalar when ``g`` and ``h`` commute."""
    return scalar_of(mul(mul(x, y), mul(inv(x), inv(y))))


# ---------------------------------------------------------------------------
# actions on tables


def _acts(g: Automorphism2):
    if g.unit:
        raise ValueError("only monomial automorphisms and exponent permutations act on tables")


def _move_table(x: SchwartzC2, g: Automorphism2) -> tuple[FilteredObject2, np.ndarray]:
    """``(r_g f)(y) = f(g^-1 y)`` as a table on the moved box."""
    P, q = x.parent, x.parent.q
    new = P.with_box(P.box.shift(g.alpha, g.beta))
    if g.perm:
        if g.alpha:
            raise ValueError("exponent permutations combine with alpha = 0 only")
        moved = {a for a, b in g.perm}
        if any(not P.box.a0 <= a <= P.box.a1 for a in moved):
            raise ValueError("exponent permutation leaves the box")
    image = [g.cell_map(a, b) for a, b in P.cells]
    pos = new.cell_index
    if sorted(pos.get(c, -1) for c in image) != list(range(len(new.cells))):
        raise ValueError("automorphism moves cells out of the region")
    t = x.table
    inv_c = pow(int(g.scalar), -1, q)
    if inv_c != 1 and t.ndim:
        idx = (np.arange(q) * inv_c) % q
        for k in range(t.ndim):
            t = np.take(t, idx, axis=k)
    # axis k of the source is the image cell; reorder to the target order
    order = np.argsort([pos[c] for c in image])
    return new, (np.transpose(t, order) if t.ndim else t)


def rep_R(gt: CentralExtElement, f: SchwartzC2) -> SchwartzC2:
    """``R_g~ f``: move by ``g``, transport the measure, divide by ``mu``."""
    _acts(gt.g)
    P = f.parent
    if P.core != gt.mu.core or f.o != gt.o:
        raise ValueError("element and function live on different objects or base levels")
    new, t = _move_table(f, gt.g)
    rho = lg_ratio(gt.g, P, P.box.lo, f.o)
    return SchwartzC2(new, t, f.scalar * complex(rho) / complex(gt.mu.scalar), f.o)


def rep_Rdist(gt: CentralExtElement, H: DistC2) -> DistC2:
    """``R'_g~ H``, characterized by ``<R f, R' H> = <f, H>``."""
    _acts(gt.g)
    P = H.parent
    if P.core != gt.mu.core or H.o != gt.o:
        raise ValueError("element and distribution live on different objects or base levels")
    new, t = _move_table(H, gt.g)
    rho = lg_ratio(gt.g, P, H.o, P.box.lo)
    return DistC2(new, t, H.scalar * complex(rho) * complex(gt.mu.scalar), H.o)


def rebase_alpha(gt: CentralExtElement, o1: int, nu: VirtualMeasure | None = None) -> CentralExtElement:
    """``(g, mu) -> (g, nu mu l_g(nu^-1))`` with ``nu`` in ``mu(F(o1)|F(o))``."""
    E = gt.parent
    if nu is None:
        nu = VirtualMeasure(E, o1, gt.o, Fraction(1))
    if nu.core != E.core or (nu.i, nu.j) != (o1, gt.o):
        raise ValueError(f"nu must lie in mu(F({o1})|F({gt.o}))")
    back = _with_core(transport_lg(gt.g, invert(nu)), E)
    return CentralExtElement(gt.g, compose_gamma(compose_gamma(nu, gt.mu), back))


def dual_element(gt: CentralExtElement) -> CentralExtElement:
    """``(g^v^-1, mu)`` acting on the dual object."""
    g, q = gt.g, gt.parent.q
    if g.unit or g.perm:
        raise ValueError("dual action is implemented for monomials")
    gd = Automorphism2(-g.alpha, -g.beta, pow(int(g.scalar), -1, q), (), (), g.order)
    return CentralExtElement(gd, dual_transport(gt.mu))


def fourier_equivariance_check(gt: CentralExtElement, x: SchwartzC2) -> dict:
    """``F(R x)`` against ``R_{(g^v^-1, mu)}(F x)`` for functions or distributions."""
    if isinstance(x, DistC2):
        lhs = fourier2_dist(rep_Rdist(gt, x))
        rhs = rep_Rdist(dual_element(gt), fourier2_dist(x))
    else:
        lhs = fourier2(rep_R(gt, x))
        rhs = rep_R(dual_element(gt), fourier2(x))
    dev = deviation(lhs, rhs)
    return {"identity": "fourier_equivariance", "max_deviation": dev, "passed": dev <= 1e-9,
            "probe_count": int(lhs.table.size)}


def pairing_invariance(gt: CentralExtElement, f: SchwartzC2, H: DistC2) -> float:
    from .harm2 import pairing2

    a = pairing2(rep_R(gt, f), rep_Rdist(gt, H))
    b = pairing2(f, H)
    return abs(a - b) / max(1.0, abs(b))


def action_scalar(gt: CentralExtElement, f: SchwartzC2) -> complex:
    """For ``g`` acting trivially on cells: the factor ``R_g~ f = c f``."""
    Rf = rep_R(gt, f)
    if Rf.parent.box != f.parent.box:
        raise ValueError("element moves the box")
    k = int(np.argmax(np.abs(f.table)))
    return complex(Rf.values.ravel()[k] / f.values.ravel()[k])


# ---------------------------------------------------------------------------
# twisted Poisson formula


def _moved_triple(T: AdmissibleTriple2, g: Automorphism2) -> AdmissibleTriple2:
    box = T.E2.box.shift(g.alpha, g.beta)
    return AdmissibleTriple2(*(FilteredObject2(E.q, E.region.shift(g.alpha, g.beta), box)
                               for E in (T.E1, T.E2, T.E3)))


def poisson2_twisted_check(T: AdmissibleTriple2, mu: VirtualMeasure, nu: VirtualMeasure,
                           gt: CentralExtElement) -> dict:
    """``R'(delta_{E1, mu nu}) = delta_{gE1, g mu g nu a}`` and its transform."""
    from .harm2 import rebase

    g = gt.g
    if g.unit or g.perm:
        raise ValueError("twisted formula is checked for monomial automorphisms")
    rep = check_aut(g, T.E2)
    if not rep["star"]:
        raise ValueError(f"automorphism fails the level condition: {rep['witness']}")
    if gt.mu.core != T.E2.core:
        raise ValueError("lift must act on the middle object")
    gT = _moved_triple(T, g)
    gmu = _with_core(transport_lg(g, mu), gT.E1)
    gnu = _with_core(transport_lg(g, nu), gT.E3)
    moved = rep_Rdist(gt, characteristic_delta(T, mu, nu))
    direct = characteristic_delta(gT, gmu, gnu)
    a = _with_core(gt.mu, gT.E2)
    direct = rebase(direct, gt.o, a)
    dev_action = deviation(moved, direct)
    # Poisson I on the moved triple, once directly and once through the
    # dual action
    lhs = fourier2_dist(direct)
    via_formula = rebase(characteristic_delta(gT.dual(), dual_transport(gnu), dual_transport(gmu)),
                         -gt.o, dual_transport(a))
    via_action = rep_Rdist(dual_element(gt),
                           characteristic_delta(T.dual(), dual_transport(nu), dual_transport(mu)))
    dev_f = deviation(lhs, via_formula)
    dev_a = deviation(lhs, via_action)
    dev = max(dev_action, dev_f, dev_a)
    return {"identity": "poisson_I_twisted", "max_deviation": dev, "passed": dev <= 1e-9,
            "action_deviation": dev_action, "formula_deviation": dev_f, "dual_action_deviation": dev_a,
            "star": rep["star"], "probe_count": int(lhs.table.size),
            "hypotheses": {"E1_c": predicates2(T.E1)["c"], "E3_d": predicates2(T.E3)["d"]}}
