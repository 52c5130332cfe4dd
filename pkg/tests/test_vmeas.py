from fractions import Fraction

import pytest

from alharm.filt2 import Automorphism2, Box, FilteredObject2, Region, dual2
from alharm.vmeas import (VirtualMeasure, canonical_delta, canonical_one, compose_gamma, dual_transport,
                          identity, invert, lg_ratio, lg_ratio_window, reference, transport_lg)

BOX = Box(-2, 1, -2, 1)


def plane(q=3):
    return FilteredObject2(q, Region.plane(), BOX)


def row_volume(q, a_min):
    """Volume of one row {a >= a_min} when {a >= 0} has volume one."""
    return Fraction(q) ** max(0, -a_min)


def test_composition_and_inverse():
    E = plane()
    m = compose_gamma(VirtualMeasure(E, 0, 1, 2), VirtualMeasure(E, 1, 2, 3))
    assert (m.i, m.j, m.scalar) == (0, 2, 6)
    x = VirtualMeasure(E, 0, 1, Fraction(5, 7))
    assert compose_gamma(x, identity(E, 1)) == x
    y = invert(VirtualMeasure(E, 0, 1, 2))
    assert (y.i, y.j, y.scalar) == (1, 0, Fraction(1, 2))
    assert invert(identity(E, 0)) == identity(E, 0)
    with pytest.raises(ValueError):
        compose_gamma(x, x)
    with pytest.raises(ValueError):
        VirtualMeasure(E, 0, 1, 0)


def test_associativity(rng):
    E = plane()
    for _ in range(20):
        lv = [int(v) for v in rng.integers(-3, 4, size=4)]
        s = [Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 20))) for _ in range(3)]
        m = [VirtualMeasure(E, lv[k], lv[k + 1], s[k]) for k in range(3)]
        assert compose_gamma(compose_gamma(m[0], m[1]), m[2]) == compose_gamma(m[0], compose_gamma(m[1], m[2]))


@pytest.mark.parametrize("q", [2, 3])
def test_unit_measure_on_compact_rows(q):
    E = FilteredObject2(q, Region.rect(a0=-2), BOX)
    assert canonical_one(E, 0, 0).scalar == 1
    # one row of {a >= -2} has volume q^2 for the reference
    assert canonical_one(E, 0, 1).scalar == 1 / row_volume(q, -2)
    assert canonical_one(E, 0, 2).scalar == 1 / row_volume(q, -2) ** 2
    assert canonical_one(E, 1, 0).scalar == row_volume(q, -2)
    with pytest.raises(ValueError):
        canonical_delta(E, 0, 1)


@pytest.mark.parametrize("q", [2, 3])
def test_counting_measure_on_discrete_rows(q):
    E = FilteredObject2(q, Region.rect(a1=1), BOX)
    # a point of a row {a <= 1} has mass 1/q^2 for the reference, counting rescales by q^2
    assert canonical_delta(E, 0, 1).scalar == Fraction(q) ** 2
    with pytest.raises(ValueError):
        canonical_one(E, 0, 1)


def test_transport_ratios():
    E = plane()
    assert lg_ratio(Automorphism2(), E, 0, 2) == 1
    # t-shift keeps rows of the plane
    assert lg_ratio(Automorphism2(beta=1), E, 0, 2) == 1
    # u-shift moves one coordinate per row across a = 0
    assert lg_ratio(Automorphism2(alpha=1), E, 0, 2) == Fraction(9)
    for g in (Automorphism2(alpha=1), Automorphism2(alpha=-1, beta=1), Automorphism2(beta=-1)):
        for i, j in ((0, 1), (1, 0), (-1, 1)):
            assert lg_ratio(g, E, i, j) == lg_ratio_window(g, E, i, j)


def test_transport_composition():
    E = plane()
    m = VirtualMeasure(E, 0, 2, Fraction(2, 3))
    g, h = Automorphism2(alpha=1), Automorphism2(alpha=1, beta=-1)
    two = transport_lg(g, transport_lg(h, m))
    one = transport_lg(g.compose(h, E.q), m)
    assert (two.i, two.j, two.scalar) == (one.i, one.j, one.scalar)
    assert transport_lg(Automorphism2(), m).scalar == m.scalar


def test_duality():
    E = FilteredObject2(3, Region.rect(a0=-2), BOX)
    m = reference(E, 0, 2)
    assert dual_transport(dual_transport(m)) == m
    assert dual_transport(m).parent == dual2(E)
    # the mass-one measure on compact rows is dual to counting on discrete rows
    one = canonical_one(E, 0, 2)
    assert one.scalar == Fraction(1, 81)
    assert dual_transport(one) == canonical_delta(dual2(E), 0, -2)
