import json

import numpy as np

from alharm.archimed import C0arObject
from alharm.filt1 import (AdmissibleTriple1, FilteredObject1, FilteredObjectAr1, amalgam1, chain_object,
                          check_equivalence, completion_psi, coordinate_triple, dual1, fibered_product1,
                          is_compact1, is_discrete1, laurent_object, refine, trivial_object1)
from alharm.finabel import (FinAbGroup, GroupHom, Subgroup, intersect, random_group, random_subgroup)


def test_laurent_window_layout():
    E = laurent_object(2, -2, 2)
    assert E.labels == (-2, -1, 0, 1)
    assert [S.order for S in E.levels] == [1, 2, 4, 8, 16]
    assert (E.tail_below, E.tail_above) == ("finite-stable", "finite-stable")


def test_symmetric_window_is_self_dual():
    E = laurent_object(3, -2, 2)
    assert dual1(E) == E
    assert dual1(dual1(E)) == E


def test_power_series_window_dual():
    O = laurent_object(2, -2, 2, emin=0)
    assert O.labels == (0, 1) and [S.order for S in O.levels] == [1, 2, 4, 4, 4]
    D = dual1(O)
    # exponents e pair with -e-1, so the dual window holds the polar part
    assert D.labels == (-2, -1)
    assert [S.order for S in D.levels] == [1, 1, 1, 2, 4]
    assert (is_compact1(O), is_discrete1(O)) == (True, False)
    assert (is_compact1(D), is_discrete1(D)) == (False, True)


def test_full_window_is_neither():
    E = laurent_object(2, -2, 2)
    assert not is_compact1(E) and not is_discrete1(E)


def test_completion():
    rng = np.random.default_rng(3)
    for _ in range(10):
        W = random_group(rng, 200)
        U = random_subgroup(rng, W)
        E = chain_object(W, -1, [Subgroup.zero(W), U, Subgroup.whole(W)])
        assert completion_psi(E) == E
        assert completion_psi(completion_psi(E)) == completion_psi(E)
        assert completion_psi(E) == dual1(dual1(E))
    assert dual1(trivial_object1()) == trivial_object1()


def test_equivalence_by_refinement(rng):
    W = FinAbGroup((2, 4, 8))
    E = chain_object(W, 0, [[], [[0, 0, 4]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]])
    assert check_equivalence(E, E)
    R = refine(E, 1, Subgroup.generated_by(W, [[0, 0, 4], [1, 0, 0]]))
    assert check_equivalence(E, R)
    F = chain_object(FinAbGroup((2, 4)), 0, [[], [[1, 0], [0, 1]]])
    assert not check_equivalence(E, F)


def _orders(E, lo, hi):
    return [E.order(i) for i in range(lo, hi + 1)]


def test_coordinate_triple_and_dual():
    E = laurent_object(2, -2, 2)
    T = coordinate_triple(E, 0)
    assert T.E1.labels == (0, 1) and T.E3.labels == (-2, -1)
    D = T.dual()
    assert D.E1.labels == (0, 1) and D.E3.labels == (-2, -1)
    for a in range(-2, 3):
        for b in range(a, 3):
            assert T.window_triple(a, b).is_exact_by_enumeration()


def product_order_by_enumeration(T, D, gamma, i):
    """Oracle: pairs (x, y) in F(i) of E2 and D with beta(x) = gamma(y)."""
    bx = T.beta.index_map()[T.E2.level(i).mask().ravel()]
    gy = gamma.index_map()[D.level(i).mask().ravel()]
    return int(sum(np.count_nonzero(gy == v) for v in bx))


def test_fibered_product_orders():
    """|product| = |E2| |D| / |E3| at every level."""
    E = laurent_object(3, -2, 2)
    T = coordinate_triple(E, 0)
    D = laurent_object(3, -2, 2, emin=-1, emax=-1)
    g = np.zeros((T.E3.ambient.rank, D.ambient.rank), dtype=object)
    g[list(T.E3.labels).index(-1), 0] = 1
    gamma = GroupHom(D.ambient, T.E3.ambient, g)
    tr, _ = fibered_product1(T, D, gamma)
    assert _orders(tr.E2, -2, 2) == [T.E2.order(i) * D.order(i) // T.E3.order(i) for i in range(-2, 3)]
    assert _orders(tr.E2, -2, 2) == [product_order_by_enumeration(T, D, gamma, i) for i in range(-2, 3)]
    assert _orders(tr.E2, -2, 2) == [1, 3, 9, 27, 27]
    # identity base map reproduces E2
    tr_id, _ = fibered_product1(T, T.E3, GroupHom.identity(T.E3.ambient))
    assert _orders(tr_id.E2, -2, 2) == _orders(E, -2, 2)


def test_amalgam_orders():
    E = laurent_object(3, -2, 2)
    T = coordinate_triple(E, 0)
    D = laurent_object(3, -2, 2, emin=0, emax=0)
    d = np.zeros((1, T.E1.ambient.rank), dtype=object)
    d[0, 0] = 1
    tr, _ = amalgam1(T, D, GroupHom(T.E1.ambient, D.ambient, d))
    assert _orders(tr.E2, -2, 2) == [D.order(i) * T.E2.order(i) // T.E1.order(i) for i in range(-2, 3)]


def test_random_chain_fibered_product(rng):
    for _ in range(5):
        W = random_group(rng, 200)
        U, V = random_subgroup(rng, W), random_subgroup(rng, W)
        chain = [Subgroup.zero(W), intersect(U, V), U, U + V, Subgroup.whole(W)]
        E = chain_object(W, 0, chain)
        T = AdmissibleTriple1.from_subgroup(E, V)
        tr, _ = fibered_product1(T, T.E3, GroupHom.identity(T.E3.ambient))
        assert _orders(tr.E2, 0, 4) == _orders(E, 0, 4)


def test_json_round_trip():
    E = laurent_object(2, -1, 2, emin=0)
    assert FilteredObject1.from_json(json.loads(json.dumps(E.to_json()))) == E


def test_archimedean_flavor_predicates():
    circle, line, lattice = C0arObject(p=1), C0arObject(q=1), C0arObject(r=1)
    E = FilteredObjectAr1(0, (circle, circle), "finite-stable", "trivial", 0)
    assert is_compact1(E) and not is_discrete1(E)
    assert is_discrete1(dual1(E)) and not is_compact1(dual1(E))
    L = FilteredObjectAr1(0, (lattice, line), "trivial", "trivial", 0)
    assert not is_compact1(L) and not is_discrete1(L)
