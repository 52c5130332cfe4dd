import itertools
import math

import numpy as np
import pytest

from alharm.adelic import (InsufficientTruncation, Place, adelic_complex_curve, arithmetic_analogy_series,
                           bx_window_probe, curve_h0_bruteforce, curve_h1_bruteforce,
                           curve_quotient_sequence_check, is_irreducible, lemma_degreewise_check, monic_polys,
                           number_field_desk_check, pdivmod, pmul, quotient_descriptor, rank,
                           surface_quotient_dimension, surface_reduction_check)
from alharm.archimed import C0arObject


def mobius(n):
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


def irreducible_count(q, d):
    """Gauss's count of monic irreducibles of degree d."""
    return sum(mobius(d // e) * q ** e for e in range(1, d + 1) if d % e == 0) // d


def span_size(M, p):
    rows = [np.array(r) for r in M]
    return len({tuple(sum((c * r for c, r in zip(cs, rows)), np.zeros(len(M[0]), dtype=int)) % p)
                for cs in itertools.product(range(p), repeat=len(rows))})


def test_rank_against_span_enumeration(rng):
    for p in (2, 3):
        for _ in range(15):
            M = rng.integers(0, p, size=(int(rng.integers(1, 5)), int(rng.integers(1, 5)))).tolist()
            assert p ** rank(M, p) == span_size(M, p)


def test_polynomial_arithmetic(rng):
    p = 3
    for _ in range(20):
        a = tuple(int(x) for x in rng.integers(0, p, size=4))
        b = tuple(int(x) for x in rng.integers(0, p, size=3)) + (1,)
        prod = np.convolve(a, b) % p
        got = pmul(a, b, p)
        assert list(got) == list(np.trim_zeros(prod, "b"))
        Q, R = pdivmod(prod.tolist(), b, p)
        assert len(R) < len(b) and list(pmul(Q, b, p)) == list(got)


@pytest.mark.parametrize("q, d", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)])
def test_irreducible_counts(q, d):
    assert sum(is_irreducible(f, q) for f in monic_polys(q, d)) == irreducible_count(q, d)


def test_places():
    assert Place.rational(3, None).is_infinite
    assert Place.rational(3, 2).degree == 1


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", range(-3, 7))
def test_cohomology_of_the_line(q, n):
    r = adelic_complex_curve(q, n, max(n + 3, 1))
    assert (r["h0"], r["h1"]) == (curve_h0_bruteforce(q, n), curve_h1_bruteforce(q, n))
    assert (r["h0"], r["h1"]) == (max(n + 1, 0), max(-n - 1, 0))


def test_truncation_must_cover_the_divisor():
    with pytest.raises(InsufficientTruncation):
        adelic_complex_curve(2, 3, 4)


def test_degree_two_places_do_not_change_cohomology():
    r = adelic_complex_curve(2, 1, 3, place_degree=2)
    assert (r["h0"], r["h1"]) == (2, 0)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("p", [None, 0, 1])
@pytest.mark.parametrize("level", range(4))
def test_quotient_sequence(q, p, level):
    r = curve_quotient_sequence_check(q, p, level)
    assert r["defect"] == 0 and all(r["compact"].values())
    assert r["dims"]["quotient"] == r["dims"]["integral"] + r["dims"]["Kp_mod_Ap"]


def crt_surjective(moduli):
    return len({tuple(x % m for m in moduli) for x in range(math.prod(moduli))}) == math.prod(moduli)


@pytest.mark.parametrize("primes, moduli", [([2, 3], [8, 9]), ([], []), ([5, 7], [25, 7])])
def test_number_field_instances(primes, moduli):
    r = number_field_desk_check(primes, moduli)
    assert r["passed"] and r["surjective"]["bruteforce"] == crt_surjective(moduli) is True
    assert all(r["structure"].values()) and all(r["duality"].values())


@pytest.mark.parametrize("q", [2, 3])
def test_surface_box(q):
    assert [surface_quotient_dimension(q, N) for N in range(9)] == [N * N for N in range(9)]
    with pytest.raises(ValueError):
        surface_quotient_dimension(q, -1)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("N", range(3))
def test_surface_reduction(q, N):
    r = surface_reduction_check(q, N)
    d = r["dims"]
    assert d["all_places"] == d["two_fields"] == d["single_field"] == d["expected"] == N * N
    assert r["lemma"]["defect"] == 0 and r["passed"]


def test_degreewise_lemma():
    for N in range(4):
        assert lemma_degreewise_check(2, N)["defect"] == 0


def test_curve_window_probe():
    small, large = bx_window_probe(2, 1), bx_window_probe(2, 3)
    assert small["enlarged"] and small["witnesses"] > 0
    assert not large["enlarged"] and large["witnesses"] == 0


def test_quotient_descriptors():
    assert quotient_descriptor(1, 1, 0) == C0arObject(p=1)
    assert quotient_descriptor(1, 1, 1) == C0arObject()
    assert quotient_descriptor(1, 1, 0).dual() == C0arObject(r=1)


@pytest.mark.parametrize("N", range(5))
def test_analogy_series(N):
    r = arithmetic_analogy_series(N)
    kinds = [s["kind"] for s in r["series"]]
    assert kinds == ["trivial"] * (N + 1) + ["circle"] * N
    assert r["circle_dual_is_Z"] and r["c_object"] and r["cf_object"] and r["passed"]
