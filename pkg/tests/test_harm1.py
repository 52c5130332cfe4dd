import numpy as np
import pytest

from alharm.filt1 import AdmissibleTriple1, chain_object, coordinate_triple, laurent_object
from alharm.finabel import FinAbGroup, Subgroup
from alharm.harm1 import (ADJOINT_PAIRS, DistC1, MeasureLine1, SchwartzC1, canonicalize1, counting_measure,
                          dual_object, fourier1, fourier1_direct, fourier1_dist, images1, pairing1,
                          poisson1_check, poisson1_lattice, unit_measure)


def _random(rng, E, a, b):
    Q, _, _ = E.window_data(a, b)
    return SchwartzC1(E, a, b, rng.normal(size=Q.shape) + 1j * rng.normal(size=Q.shape))


def _objects():
    W = FinAbGroup((2, 4, 8))
    E = chain_object(W, 0, [[], [[0, 0, 4]], [[0, 0, 4], [1, 0, 0]], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]])
    chain = AdmissibleTriple1.from_subgroup(E, Subgroup.generated_by(W, [[0, 2, 2]])).E2
    return [laurent_object(3, -2, 2), laurent_object(2, -3, 2, emin=-1), chain]


def test_power_series_indicator_is_self_dual():
    E = laurent_object(2, -3, 3)
    one = SchwartzC1.indicator(E, 0)
    F = fourier1(one, MeasureLine1(E, 1.0))
    assert F.parent == E and F.window == (0, 0)
    assert np.allclose(F.lifted(), one.lifted())


def test_dirac_goes_to_measure_kernel():
    E = laurent_object(2, -2, 2)
    mu = MeasureLine1(E, 1.0)
    F = fourier1(SchwartzC1.dirac(E), mu)
    # constant equal to the mass of the finest point
    assert np.allclose(F.lifted(), mu.point_mass())


def test_two_routes_inversion_and_transpose(rng):
    for E in _objects():
        for a in range(E.lo, E.hi + 1):
            for b in range(a, E.hi + 1):
                f = _random(rng, E, a, b)
                mu = MeasureLine1(E, 0.7 - 0.2j)
                g = fourier1(f, mu)
                assert np.abs(g.lifted() - fourier1_direct(f, mu).lifted()).max() < 1e-10
                back = fourier1(g, mu.inverse())
                assert back.parent == E
                assert np.abs(back.lifted() - f.reflect().lifted()).max() < 1e-10
                H = DistC1(dual_object(E), rng.normal(size=E.ambient.shape))
                assert abs(pairing1(g, H) - pairing1(f, fourier1_dist(H, mu))) < 1e-9


def test_window_independence(rng):
    E = laurent_object(3, -2, 2)
    f = _random(rng, E, -1, 1)
    H = DistC1(E, rng.normal(size=E.ambient.shape))
    assert abs(pairing1(f, H) - pairing1(f, H, window=(-2, 2))) < 1e-9
    c = canonicalize1(f.at_window(-2, 2))
    assert c.window == (-1, 1)


def test_pairing_examples():
    E = laurent_object(2, -2, 2)
    f = SchwartzC1.indicator(E, 0)
    dirac = np.zeros(E.ambient.shape)
    dirac[(0,) * E.ambient.rank] = 1
    assert pairing1(f, DistC1(E, dirac)) == 1
    mu = MeasureLine1(E, 1.0)
    # F(0) has volume one for the reference measure
    assert abs(mu.integrate(f) - 1) < 1e-12
    assert abs(mu.integrate(SchwartzC1.indicator(E, 1)) - 2) < 1e-12


def test_canonical_measures():
    O = laurent_object(3, -2, 2, emin=0)
    assert abs(unit_measure(O).integrate(SchwartzC1.indicator(O, O.hi)) - 1) < 1e-12
    D = laurent_object(3, -2, 2, emax=-1)
    assert abs(counting_measure(D).point_mass() - 1) < 1e-12
    with pytest.raises(ValueError):
        unit_measure(laurent_object(3, -2, 2))


def test_image_examples():
    T = coordinate_triple(laurent_object(2, -2, 2), 0)
    mu = MeasureLine1(T.E1, 1.0)
    one = SchwartzC1.indicator(T.E2, T.E2.hi)
    assert np.allclose(images1(T, one, "I3").lifted(), 1)
    ind = SchwartzC1.indicator(T.E2, 0)
    out = images1(T, ind, "I1", mu)
    # the fiber of F(0) over 0 is F(0) of E1, of volume one
    assert np.allclose(out.lifted(), SchwartzC1.indicator(T.E3, 0).lifted())
    L = coordinate_triple(laurent_object(2, -2, 2), 0, "lower")
    with pytest.raises(ValueError, match="discrete"):
        images1(L, SchwartzC1.indicator(L.E1, 0), "I7")


def test_adjoint_pairs(rng):
    for split in (-1, 0, 1):
        for sub in ("upper", "lower"):
            T = coordinate_triple(laurent_object(3, -2, 2), split, sub)
            mu = MeasureLine1(T.E1, 1.3)
            for m1, m2 in ADJOINT_PAIRS:
                src = {"I1": T.E2, "I3": T.E2, "I5": T.E3, "I7": T.E1}[m1]
                f = _random(rng, src, src.lo, src.hi)
                try:
                    out = images1(T, f, m1, mu)
                except ValueError:
                    assert m1 in ("I5", "I7")
                    continue
                H = DistC1(out.parent, rng.normal(size=out.parent.ambient.shape))
                assert abs(pairing1(out, H) - pairing1(f, images1(T, H, m2, mu))) < 1e-9


def test_poisson(rng):
    for split in (-1, 0, 1):
        for sub in ("upper", "lower"):
            T = coordinate_triple(laurent_object(3, -2, 2), split, sub)
            r = poisson1_check(T, MeasureLine1(T.E1, 1.3), MeasureLine1(dual_object(T.E3), 0.4))
            assert r["max_deviation"] <= 1e-9
    assert poisson1_lattice([1.0, 0.0, 0.3])["max_deviation"] <= 1e-10
