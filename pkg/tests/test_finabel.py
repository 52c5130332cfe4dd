import itertools
import json
import math

import numpy as np
import pytest

from alharm.finabel import (AdmissibleTripleC0, DistributionC0, FinAbGroup, FunctionC0, GroupHom, MeasureC0,
                            Subgroup, c0_identity_suite, epi_pullback, epi_pushforward, eval_char, fourier_c0,
                            fourier_c0_dist, mono_pushforward, poisson_c0_check, quotient, random_function,
                            random_group, random_triple, smith_normal_form)


def _det(M):
    M = [list(map(int, r)) for r in M]
    n = len(M)
    if n == 0:
        return 1
    return sum((-1) ** j * M[0][j] * _det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(n))


def determinantal_divisors(M):
    """Oracle: gcd of all k x k minors; invariant factors are their ratios."""
    m, n = len(M), len(M[0])
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = math.gcd(g, _det([[M[i][j] for j in cols] for i in rows]))
        out.append(g)
    return out


def brute_fourier(values, G, scalar):
    """Oracle: character sum over all elements."""
    elems = [G.element(r) for r in G.elements()]
    flat = np.asarray(values).ravel()
    out = np.zeros(G.order, dtype=complex)
    for k, chi in enumerate(elems):
        out[k] = scalar * sum(flat[j] * np.conj(eval_char(chi, x)) for j, x in enumerate(elems))
    return out.reshape(G.shape)


@pytest.mark.parametrize("M, diag", [([[1, 0], [0, 1]], [1, 1]), ([[2, 4], [6, 8]], [2, 4]), ([[0]], [0])])
def test_smith_examples(M, diag):
    U, S, V = smith_normal_form(M)
    assert np.array_equal(np.array(U) @ np.array(M, dtype=object) @ np.array(V), S)
    assert [S[i][i] for i in range(len(diag))] == diag


def test_smith_against_determinantal_divisors(rng):
    for _ in range(25):
        m, n = (int(x) for x in rng.integers(1, 4, size=2))
        M = rng.integers(-9, 10, size=(m, n)).tolist()
        U, S, V = smith_normal_form(M)
        assert np.array_equal(np.array(U, dtype=object) @ np.array(M, dtype=object) @ np.array(V, dtype=object), S)
        assert abs(_det(np.array(U).tolist())) == 1 and abs(_det(np.array(V).tolist())) == 1
        d = [int(S[i][i]) for i in range(min(m, n))]
        dd = determinantal_divisors(M)
        prod = 1
        for k in range(len(d)):
            prod *= d[k]
            assert prod == dd[k]
        for a, b in zip(d, d[1:]):
            assert (b == 0) or (a != 0 and b % a == 0)


def test_group_rejects_non_chain():
    with pytest.raises(ValueError):
        FinAbGroup((4, 6))
    with pytest.raises(ValueError):
        FinAbGroup((1,))


def _coset_count(G, H):
    """Oracle: number of cosets by enumeration."""
    elems = [tuple(r) for r in G.elements()]
    members = set()
    for r in itertools.product(*[range(d) for d in G.moduli]):
        lat = np.array(H.basis, dtype=int) if H.basis else np.zeros((0, G.rank), dtype=int)
        members.add(tuple(int(x) % d for x, d in zip(np.array(r) @ lat, G.moduli)) if len(lat) else ())
    return len(elems) // len(members)


@pytest.mark.parametrize("mods, gens, order", [((4,), [[2]], 2), ((2, 2), [[1, 1]], 2), ((6,), [[1]], 1)])
def test_quotient_examples(mods, gens, order):
    G = FinAbGroup(mods)
    H = Subgroup.generated_by(G, gens)
    Q, proj = quotient(G, H)
    assert Q.order == order == _coset_count(G, H)
    assert len(set(proj.index_map().tolist())) == Q.order


def test_characters():
    assert FinAbGroup((6,)).dual() == FinAbGroup((6,))
    Z4 = FinAbGroup((4,))
    assert abs(eval_char(Z4.element([1]), Z4.element([1])) - 1j) < 1e-15
    for x in range(4):
        assert eval_char(Z4.zero(), Z4.element([x])) == 1


@pytest.mark.parametrize("f, image", [((1, 0), (1, 1)), ((1, 1), (2, 0))])
def test_fourier_z2(f, image):
    out = fourier_c0(FunctionC0(FinAbGroup((2,)), np.array(f)), MeasureC0(FinAbGroup((2,))))
    assert np.allclose(out.values, image)


def test_fourier_trivial_group():
    G = FinAbGroup(())
    out = fourier_c0(FunctionC0(G, np.array(3 - 1j)), MeasureC0(G, 1.0))
    assert out.values.item() == 3 - 1j


def test_fourier_matches_character_sums(rng):
    for _ in range(12):
        G = random_group(rng, 48)
        f = random_function(rng, G)
        s = complex(rng.normal(), rng.normal())
        assert np.abs(fourier_c0(f, MeasureC0(G, s)).values - brute_fourier(f.values, G, s)).max() < 1e-10


def test_fourier_inversion_and_transpose(rng):
    for _ in range(40):
        G = random_group(rng, 4096)
        f = random_function(rng, G)
        mu = MeasureC0(G, complex(rng.uniform(0.5, 2), rng.normal()))
        back = fourier_c0(fourier_c0(f, mu), mu.inverse())
        assert np.abs(back.values - f.reflect().values).max() < 1e-9
        H = random_function(rng, G, DistributionC0)
        g = random_function(rng, G)
        assert abs(H.pair(fourier_c0(g, mu)) - fourier_c0_dist(H, mu).pair(g)) < 1e-8


def _z4_mod_2():
    Z4, Z2 = FinAbGroup((4,)), FinAbGroup((2,))
    return AdmissibleTripleC0(GroupHom(Z2, Z4, [[2]]), GroupHom(Z4, Z2, [[1]]))


def test_image_examples():
    T = _z4_mod_2()
    assert T.is_exact_by_enumeration()
    delta = FunctionC0(T.G2, np.array([1, 0, 0, 0]))
    assert np.allclose(epi_pushforward(T, delta, MeasureC0(T.G1)).values, [1, 0])
    one = FunctionC0(T.G2, np.ones(4))
    assert np.allclose(epi_pushforward(T, one, MeasureC0(T.G1)).values, [2, 2])
    assert np.allclose(mono_pushforward(T, FunctionC0(T.G1, np.array([1, 0]))).values, [1, 0, 0, 0])
    assert np.allclose(epi_pullback(T, FunctionC0(T.G3, np.array([1, 0]))).values, [1, 0, 1, 0])


def test_poisson_examples():
    T = _z4_mod_2()
    r = poisson_c0_check(T, MeasureC0(T.G1), MeasureC0(T.G3.dual()))
    assert r["max_deviation"] <= 1e-12
    # full subgroup: the transform of the Haar measure sits at the trivial character
    G = FinAbGroup((2, 6))
    T = AdmissibleTripleC0.from_subgroup(G, Subgroup.whole(G))
    r = poisson_c0_check(T, MeasureC0(T.G1, 1 / G.order), MeasureC0(T.G3.dual()))
    v = r["lhs"].values.ravel()
    assert abs(v[0] - 1) < 1e-12 and np.abs(v[1:]).max() < 1e-12 and r["max_deviation"] < 1e-12


def test_poisson_random(rng):
    for _ in range(50):
        T = random_triple(rng, 1024)
        r = poisson_c0_check(T, MeasureC0(T.G1, complex(rng.uniform(0.5, 2))), MeasureC0(T.G3.dual(), 1.3))
        assert r["max_deviation"] <= 1e-9


def test_identity_suite(rng):
    devs = c0_identity_suite(rng, 512)
    assert len(devs) == 24
    assert max(devs.values()) <= 1e-9, devs


def test_json_round_trip(rng):
    G = random_group(rng, 100)
    f = random_function(rng, G)
    g = FunctionC0.from_json(json.loads(json.dumps(f.to_json())))
    assert g.group == G and np.array_equal(g.values, f.values)
