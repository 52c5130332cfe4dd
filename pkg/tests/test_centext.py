from fractions import Fraction

import pytest

from alharm.centext import (action_scalar, commutator, dual_element, fourier_equivariance_check, identity, inv,
                            lift, mul, pairing_invariance, poisson2_twisted_check, rebase_alpha, rep_R,
                            scalar_of)
from alharm.filt2 import (AdmissibleTriple2, Automorphism2, Box, FilteredObject2, Region, bottom_level,
                          make_local_field2, top_level)
from alharm.harm2 import DistC2, SchwartzC2, deviation, rebase
from alharm.vmeas import VirtualMeasure

T_SHIFT, U_SHIFT = Automorphism2(beta=1), Automorphism2(alpha=1)


@pytest.fixture
def field():
    return make_local_field2(3, (-2, 1), (-2, 1))


def test_group_axioms(field):
    x = lift(T_SHIFT, field, 0, 2)
    y = lift(U_SHIFT, field, 0, Fraction(3, 7))
    z = lift(Automorphism2(alpha=-1, beta=1, scalar=2), field, 0, 5)
    e = identity(field, 0)
    assert mul(mul(x, y), z).key() == mul(x, mul(y, z)).key()
    assert mul(x, inv(x)).key() == e.key() == mul(inv(x), x).key()
    assert mul(e, y).key() == y.key() == mul(y, e).key()
    # projection to automorphisms is a homomorphism
    g = mul(x, z).g
    h = T_SHIFT.compose(Automorphism2(alpha=-1, beta=1, scalar=2), 3)
    assert (g.alpha, g.beta, g.scalar % 3) == (h.alpha, h.beta, h.scalar % 3)


def test_central_scalars(field):
    c = lift(Automorphism2(), field, 0, Fraction(2, 5))
    x = lift(T_SHIFT, field, 0, 7)
    assert mul(c, x).key() == mul(x, c).key()
    assert scalar_of(c) == Fraction(2, 5)
    with pytest.raises(ValueError):
        scalar_of(x)


def test_commutator_is_lift_independent():
    q = 3
    values = set()
    for bx in ((-2, 1, -2, 1), (-3, 2, -1, 1)):
        E = FilteredObject2(q, Region.plane(), Box(*bx))
        for s1, s2 in ((1, 1), (7, Fraction(1, 5)), (Fraction(2, 3), 4)):
            values.add(commutator(lift(T_SHIFT, E, 0, s1), lift(U_SHIFT, E, 0, s2)))
    assert values == {Fraction(q)}
    E = make_local_field2(q, (-2, 1), (-2, 1))
    x, y = lift(T_SHIFT, E, 0), lift(U_SHIFT, E, 0)
    assert commutator(y, x) == 1 / commutator(x, y)


def test_lift_rejects_non_automorphisms():
    lattice = FilteredObject2(2, Region.rect(a0=0), Box(-1, 1, -1, 1))
    with pytest.raises(ValueError):
        lift(Automorphism2(alpha=-1), lattice, 0)


@pytest.fixture
def f2(rng):
    E = FilteredObject2(2, Region.plane(), Box(-2, 1, -1, 1))
    f = SchwartzC2(E, rng.normal(size=E.shape) + 0j, 1.3, 0)
    H = DistC2(E, rng.normal(size=E.shape) + 0j, 0.4, 0)
    gs = [lift(T_SHIFT, E, 0, 2.0), lift(U_SHIFT, E, 0, 0.5), lift(Automorphism2(alpha=-1, beta=-1), E, 0, 3)]
    return E, f, H, gs


def test_representation_law(f2):
    _, f, _, (g1, g2, g3) = f2
    for a, b in ((g1, g2), (g2, g3), (g3, g1)):
        assert deviation(rep_R(a, rep_R(b, f)), rep_R(mul(a, b), f)) <= 1e-12


def test_pairing_invariance(f2):
    _, f, H, gs = f2
    for g in gs:
        assert pairing_invariance(g, f, H) <= 1e-12


def test_fourier_equivariance(f2, rng):
    _, f, _, gs = f2
    for g in gs:
        assert fourier_equivariance_check(g, f)["max_deviation"] <= 1e-9
    Eq = FilteredObject2(3, Region.plane(), Box(-1, 1, -1, 0))
    f3 = SchwartzC2(Eq, rng.normal(size=Eq.shape) + 0j, 1, 0)
    H3 = DistC2(Eq, rng.normal(size=Eq.shape) + 0j, 1, 0)
    for g in (lift(Automorphism2(scalar=2), Eq, 0, 1), lift(Automorphism2(alpha=1, scalar=2), Eq, 0, 2)):
        assert fourier_equivariance_check(g, f3)["max_deviation"] <= 1e-9
        assert fourier_equivariance_check(g, H3)["max_deviation"] <= 1e-9
    assert fourier_equivariance_check(identity(Eq, 0), f3)["max_deviation"] == 0
    d = dual_element(dual_element(gs[0]))
    assert d.key() == gs[0].key()


def test_commutator_acts_by_its_scalar(f2):
    _, f, _, (g1, g2, _) = f2
    cm = mul(mul(g1, g2), mul(inv(g1), inv(g2)))
    assert abs(action_scalar(cm, f) - 1 / complex(commutator(g1, g2))) < 1e-12


def test_base_level_change(f2):
    E, f, _, (g1, _, _) = f2
    assert rebase_alpha(g1, 0).key() == g1.key()
    a1 = rebase_alpha(g1, 2)
    assert a1.key() == rebase_alpha(g1, 2, VirtualMeasure(E, 2, 0, 5)).key()
    assert rebase_alpha(a1, 0).key() == g1.key()
    m = VirtualMeasure(E, 0, 2, 1)
    assert deviation(rep_R(a1, rebase(f, 2, m)), rebase(rep_R(g1, f), 2, m)) <= 1e-12


def test_twisted_poisson(f2):
    E, _, _, gs = f2
    T = AdmissibleTriple2.split(E, Region.rect(b0=1))
    mu = VirtualMeasure(T.E1, 0, top_level(T.E1), 2.0)
    nu = VirtualMeasure(T.E3, 0, bottom_level(T.E3), 3.0)
    for g in gs:
        r = poisson2_twisted_check(T, mu, nu, g)
        assert r["star"] and r["max_deviation"] <= 1e-9


def test_units_do_not_act_on_tables(f2):
    E, f, _, _ = f2
    g = lift(Automorphism2(unit=(((1, 0), 1),)), E, 0)
    with pytest.raises(ValueError, match="monomial"):
        rep_R(g, f)
