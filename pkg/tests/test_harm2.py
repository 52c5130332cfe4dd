import itertools
from dataclasses import replace
import numpy as np
import pytest

from alharm.filt2 import AdmissibleTriple2, Box, FilteredObject2, Region, bottom_level, dual2, top_level
from alharm.harm2 import (BASE_CHANGE_IDENTITIES, FUNCTION_MODES, DistC2, SchwartzC2, adjointness_check,
                          base_change2_check, characteristic_delta_cf, check, deviation, fourier2, fourier2_check, fourier2_dist,
                          fourier2_factored, fourier_image_check, pairing2, pairing2_factored,
                          poisson2_I_check, poisson2_II_check, poisson2_reduction_check, random_factored,
                          rebase, reframe)
from alharm.vmeas import VirtualMeasure, canonical_one


def brute_fourier2(f):
    """Oracle: sum over every point of the box with the residue pairing."""
    P, Q = f.parent, dual2(f.parent)
    q = P.q
    src = {c: k for k, c in enumerate(P.cells)}
    partner = [src[(-a - 1, -b - 1)] for a, b in Q.cells]
    w = np.prod([1.0 / q if a >= 0 else 1.0 for a, _ in P.cells])
    out = np.zeros(Q.shape, dtype=complex)
    pts = list(itertools.product(range(q), repeat=len(P.cells)))
    for y in pts:
        acc = 0j
        for x in pts:
            res = sum(x[partner[k]] * y[k] for k in range(len(y)))
            acc += f.table[x] * np.exp(-2j * np.pi * res / q)
        out[y] = w * acc
    return out


@pytest.mark.parametrize("q, box", [(2, Box(-1, 0, -1, 0)), (3, Box(-1, 0, 0, 0)), (2, Box(0, 1, -1, 0))])
def test_transform_matches_character_sum(rng, q, box):
    P = FilteredObject2(q, Region.plane(), box)
    f = SchwartzC2(P, rng.normal(size=P.shape) + 1j * rng.normal(size=P.shape), 1.0, 1)
    F = fourier2(f)
    assert F.parent == dual2(P) and F.o == -1
    assert np.abs(F.table - brute_fourier2(f)).max() < 1e-12


@pytest.mark.parametrize("q, box", [(2, Box(-1, 0, -1, 0)), (3, Box(-1, 1, -1, 0)), (2, Box(-2, 1, -2, 1)),
                                    (3, Box(-2, 1, -2, 1))])
def test_inversion_and_adjoint(q, box):
    r = fourier2_check(q, box, 11)
    assert r["max_deviation"] <= 1e-9
    cells = (box.a1 - box.a0 + 1) * (box.b1 - box.b0 + 1)
    assert r["route"] == ("dense" if q ** cells <= 1 << 16 else "factored")


def test_factored_agrees_with_dense(rng):
    P = FilteredObject2(2, Region.plane(), Box(-1, 0, -1, 0))
    x = random_factored(rng, P, 3)
    assert deviation(fourier2_factored(x).dense(), fourier2(x.dense())) < 1e-12
    G = random_factored(rng, dual2(P), 2, dist=True)
    G = replace(G, o=-x.o)
    assert abs(pairing2_factored(fourier2_factored(x), G) - pairing2(fourier2(x.dense()), G.dense())) < 1e-10


def test_dense_limit():
    P = FilteredObject2(3, Region.plane(), Box(-2, 1, -2, 1))
    with pytest.raises(ValueError, match="factored"):
        SchwartzC2(P, np.zeros(1), 1.0, 0)


def test_box_must_straddle_zero():
    with pytest.raises(ValueError):
        SchwartzC2(FilteredObject2(2, Region.plane(), Box(1, 2, 0, 0)), np.zeros((2, 2)), 1.0, 0)


def test_reframe_commutes_with_transform(rng):
    P = FilteredObject2(3, Region.plane(), Box(-1, 1, -2, 1))
    f = SchwartzC2(P, rng.normal(size=P.shape) + 0j, 1.5, 1)
    for small in (Box(-1, 1, -1, 0), Box(-2, 2, -1, 0), Box(-1, 1, -2, 0)):
        g = reframe(f, small)
        assert deviation(fourier2(g), reframe(fourier2(f), small.reflect())) < 1e-12
    big = P.with_box(Box(-2, 2, -1, 0))
    G = DistC2(big, rng.normal(size=big.shape) + 0j, 0.7, 1)
    ref = pairing2(f, G)
    assert abs(pairing2(reframe(f, Box(-2, 2, -1, 0)), G) - ref) < 1e-9
    assert abs(pairing2(f, reframe(G, Box(-1, 1, -2, 0))) - ref) < 1e-9


def test_rebase():
    E = FilteredObject2(2, Region.rect(a0=0), Box(-1, 1, -1, 1))
    f = SchwartzC2(E, np.ones(E.shape), 2.0, 0)
    assert deviation(rebase(f, 0, VirtualMeasure(E, 0, 0, 1)), f) == 0
    one_step = rebase(f, 2)
    two_step = rebase(rebase(f, 1), 2)
    assert deviation(one_step, two_step) < 1e-15
    # cf objects: rebasing along the unit measure keeps the table
    assert np.array_equal(one_step.table, f.table)
    assert one_step.scalar == 2.0 * float(canonical_one(E, 0, 2).scalar)


def _triples(q=2):
    E = FilteredObject2(q, Region.plane(), Box(-1, 1, -1, 1))
    return AdmissibleTriple2.split(E, Region.rect(b0=1)), AdmissibleTriple2.split(E, Region.rect(a0=0))


@pytest.mark.parametrize("mode", list(FUNCTION_MODES))
def test_adjoint_modes(mode):
    Tc, Tf = _triples()
    T = Tc if mode in ("beta_lower", "alpha_upper") else Tf
    assert adjointness_check(T, mode, 4)["max_deviation"] < 1e-9


@pytest.mark.parametrize("square", range(1, 9))
def test_fourier_image_squares(square):
    Tc, Tf = _triples()
    assert fourier_image_check(Tc if square <= 4 else Tf, square, 5)["max_deviation"] <= 1e-9


@pytest.mark.parametrize("k", range(1, 17))
def test_base_change_identities(k):
    r = base_change2_check(k, 2, k)
    assert r["identity"] == BASE_CHANGE_IDENTITIES[k - 1]
    assert r["max_deviation"] <= 1e-9 and r["probe_count"] > 1


def test_poisson_first(rng):
    Tc, _ = _triples()
    for o in (-1, 0, 1):
        mu = VirtualMeasure(Tc.E1, o, top_level(Tc.E1), float(rng.uniform(0.5, 2)))
        nu = VirtualMeasure(Tc.E3, o, bottom_level(Tc.E3), float(rng.uniform(0.5, 2)))
        r = poisson2_I_check(Tc, mu, nu)
        assert r["hypotheses"] == {"E1_c": True, "E3_d": True}
        assert r["lemma_deviation"] <= 1e-12 and r["max_deviation"] <= 1e-9


@pytest.mark.parametrize("o", [-2, 0, 1, 3])
def test_poisson_second(o):
    _, Tf = _triples(3)
    r = poisson2_II_check(Tf, o)
    assert r["hypotheses"] == {"E1_cf": True, "E3_df": True}
    assert r["lemma_deviation"] <= 1e-12 and r["max_deviation"] <= 1e-9


def test_lattice_indicator_is_self_dual():
    E = FilteredObject2(2, Region.plane(), Box(-1, 1, -1, 1))
    T = AdmissibleTriple2.split(E, Region.rect(a0=0))
    ind = characteristic_delta_cf(T, 0)
    lattice = {c for c in E.cells if c[0] >= 0}
    # 1 on the lattice coordinates being anything, the rest zero
    idx = [k for k, c in enumerate(E.cells) if c not in lattice]
    nz = np.argwhere(np.abs(ind.values) > 1e-12)
    assert np.all(nz[:, idx] == 0)
    assert deviation(fourier2(ind), characteristic_delta_cf(T.dual(), 0)) < 1e-12


@pytest.mark.parametrize("q", [2, 3])
def test_one_cell_reduction(q):
    assert poisson2_reduction_check(q)["max_deviation"] <= 1e-12


def test_transform_rejects_other_inputs():
    E = FilteredObject2(2, Region.plane(), Box(0, 0, 0, 0))
    with pytest.raises(TypeError):
        fourier2(DistC2(E, np.ones(E.shape), 1.0, 0))
    with pytest.raises(TypeError):
        fourier2_dist(SchwartzC2(E, np.ones(E.shape), 1.0, 0))
    assert deviation(check(check(SchwartzC2(E, np.arange(2.0), 1.0, 0))),
                     SchwartzC2(E, np.arange(2.0), 1.0, 0)) == 0
