import json
import math

import pytest

from alharm.filt2 import (AdmissibleTriple2, Automorphism2, Box, FilteredObject2, FilteredObjectAr2, Region,
                          amalgam2, bottom_level, check_aut, completion_omega, dual2, fibered_product2,
                          levelwise_product_orders, make_local_field2, predicates2, top_level)
from alharm.harm2 import base_change_square

WINDOW = [(a, b) for a in range(-4, 4) for b in range(-4, 4)]


def cells_of(R):
    return {c for c in WINDOW if R.contains(*c)}


REGIONS = [Region.plane(), Region.rect(b0=1), Region.rect(a0=0), Region.rect(a1=-1, b1=0),
           Region.rect(a0=-1, a1=0, b0=-1, b1=0) | Region.rect(b0=1), Region.empty()]


def test_region_algebra_matches_cell_sets():
    for R in REGIONS:
        for S in REGIONS:
            assert cells_of(R | S) == cells_of(R) | cells_of(S)
            assert cells_of(R & S) == cells_of(R) & cells_of(S)
            assert cells_of(R - S) == cells_of(R) - cells_of(S)
        refl = {(-a - 1, -b - 1) for a, b in cells_of(R)}
        assert cells_of(R.reflect()) == {c for c in refl if c in set(WINDOW)}
        moved = R.shift(1, -1)
        assert all(moved.contains(a, b) == R.contains(a - 1, b + 1) for a, b in WINDOW)


def test_box_order():
    E = make_local_field2(2, (-1, 1), (-1, 1))
    assert E.order == 2 ** 9 == math.prod(E.shape)
    E3 = make_local_field2(3, (0, 2), (0, 0))
    assert [E3.slab(i - 1, i).ambient.order for i in range(E3.box.lo + 1, E3.box.hi + 1)] == [3, 3, 3]


def test_real_flavor():
    A = make_local_field2("R", (0, 0))
    assert isinstance(A, FilteredObjectAr2) and A.level_object(0).q == 1
    assert dual2(dual2(A)) == A


def test_symmetric_box_is_self_dual():
    E = make_local_field2(3, (-2, 1), (-2, 1))
    assert dual2(E) == E and completion_omega(E) == E


@pytest.mark.parametrize("region, flags", [
    (Region.rect(b0=0), {"c": True, "d": False, "cf": False, "df": False}),
    (Region.rect(a0=0), {"c": False, "d": False, "cf": True, "df": False}),
    (Region.plane(), {"c": False, "d": False, "cf": False, "df": False}),
    (Region.empty(), {"c": True, "d": True, "cf": True, "df": True}),
])
def test_predicates(region, flags):
    E = FilteredObject2(2, region, Box(-2, 1, -2, 1))
    assert predicates2(E) == flags
    D = predicates2(dual2(E))
    assert (D["c"], D["d"], D["cf"], D["df"]) == (flags["d"], flags["c"], flags["df"], flags["cf"])


def test_levels_of_lattices():
    E = FilteredObject2(2, Region.rect(b0=1), Box(-1, 1, -2, 2))
    assert top_level(E) == -1
    D = FilteredObject2(2, Region.rect(b1=0), Box(-1, 1, -2, 2))
    assert bottom_level(D) == -1


def test_split_triple_requires_partition():
    E = make_local_field2(2, (-1, 1), (-1, 1))
    T = AdmissibleTriple2.split(E, Region.rect(b0=1))
    assert T.dual().dual() == T
    with pytest.raises(ValueError):
        AdmissibleTriple2(T.E1, E, T.E1)


@pytest.mark.parametrize("k", [1, 3, 5, 7, 9, 11])
def test_fibered_products_levelwise(k):
    sq = base_change_square(2, k, Box(-2, 1, -2, 1))
    for row in levelwise_product_orders(sq["main"], sq["right"].E1):
        assert row["product"] == row["coordinate"] == row["formula"]


def test_degenerate_fibered_product_and_amalgam():
    E = make_local_field2(2, (-1, 1), (-1, 1))
    T = AdmissibleTriple2.split(E, Region.rect(b0=1))
    top, _ = fibered_product2(T, T.E3)
    assert top.E2 == E
    zero = FilteredObject2(2, Region.empty(), E.box)
    top, _ = fibered_product2(T, zero)
    assert top.E2.region == T.E1.region
    outer, _ = amalgam2(T, E)
    assert outer.E2 == E


def test_automorphisms():
    E = make_local_field2(2, (-2, 1), (-2, 1))
    r = check_aut(Automorphism2(beta=1), E)
    assert r["aut_prime"] and r["star"]
    assert all(j == i - 1 for i, j in r["level_map"].items())
    r = check_aut(Automorphism2(alpha=1), E)
    assert r["aut_prime"] and r["star"] and set(r["level_map"].items()) == {(i, i) for i in r["level_map"]}
    r = check_aut(Automorphism2(), E)
    assert r["aut_prime"] and r["star"]
    r = check_aut(Automorphism2(unit=(((1, 0), 1),)), E)
    assert r["aut_prime"]
    lattice = FilteredObject2(2, Region.rect(a0=0), E.box)
    r = check_aut(Automorphism2(alpha=-1), lattice)
    assert not r["aut_prime"] and r["witness"]


def test_automorphism_group_law():
    q = 3
    g = Automorphism2(alpha=1, beta=-1, scalar=2, unit=(((1, 0), 1),))
    h = Automorphism2(beta=2, scalar=2)
    e = g.compose(g.inverse(q), q)
    assert (e.alpha, e.beta, e.scalar % q, e.unit) == (0, 0, 1, ())
    gh = g.compose(h, q)
    assert (gh.alpha, gh.beta, gh.scalar) == (1, 1, 1)


def test_json_round_trip():
    E = FilteredObject2(3, Region.rect(a0=-1, a1=0, b0=-1, b1=0) | Region.rect(b0=1), Box(-2, 1, -2, 1))
    assert FilteredObject2.from_json(json.loads(json.dumps(E.to_json()))) == E
