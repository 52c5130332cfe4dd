import math

import numpy as np
import pytest
from scipy import integrate, special

from alharm.archimed import (AdmissibleTripleC0ar, C0arObject, CutoffOverflow, DistC0ar, MeasureC0ar,
                             SchwartzC0ar, fourier_c0ar, fourier_c0ar_dist, hermite_eigen_check,
                             hermite_functions, images_c0ar, poisson_lattice_check, reflect_ar, translate)
from alharm.finabel import AdmissibleTripleC0, FinAbGroup, Subgroup

SMALL = dict(zbox=3, modes=3, degree=8)


def psi_oracle(m, x):
    """Normalized Hermite function from the physicists' polynomial."""
    y = math.sqrt(2 * math.pi) * x
    norm = (2 * math.pi) ** 0.25 / math.sqrt(2.0 ** m * math.factorial(m) * math.sqrt(math.pi))
    return norm * special.eval_hermite(m, y) * math.exp(-y * y / 2)


def test_hermite_functions_match_polynomials():
    xs = np.linspace(-1.7, 2.3, 9)
    H = hermite_functions(13, xs)
    for m in range(13):
        assert np.allclose(H[m], [psi_oracle(m, x) for x in xs], atol=1e-12)


def test_gaussian_is_fixed_by_quadrature():
    for y in (0.0, 0.4, -1.1):
        re = integrate.quad(lambda x: psi_oracle(0, x) * math.cos(2 * math.pi * x * y), -8, 8, epsabs=1e-14)[0]
        assert abs(re - psi_oracle(0, y)) < 1e-10


def test_eigenrelation_degrees_up_to_12():
    r = hermite_eigen_check(13)
    assert r["max_deviation"] <= 1e-10 and len(r["per_degree"]) == 13


def test_lattice_poisson_gaussian_value():
    r = poisson_lattice_check([1.0])
    # sum over n of exp(-pi n^2) equals pi^(1/4) / Gamma(3/4)
    theta = math.pi ** 0.25 / math.gamma(0.75)
    assert abs(r["lhs"] - 2 ** 0.25 * theta) < 1e-12
    assert r["max_deviation"] <= 1e-10


def test_lattice_poisson_odd_and_zero(rng):
    assert poisson_lattice_check([0.0, 1.0])["max_deviation"] <= 1e-10
    assert poisson_lattice_check([0.0])["lhs"] == 0
    for _ in range(5):
        c = rng.normal(size=10) + 1j * rng.normal(size=10)
        assert poisson_lattice_check(c)["max_deviation"] <= 1e-10


def test_circle_character_goes_to_lattice_delta():
    T = C0arObject(p=1)
    f = SchwartzC0ar.zeros(T, **SMALL)
    c = f.coeffs.copy()
    c[SMALL["modes"] + 1] = 1
    g = fourier_c0ar(f.like(c), MeasureC0ar(T))
    assert g.obj == C0arObject(r=1)
    assert [abs(g((), [n], [], [])) for n in range(-2, 3)] == [0, 0, 0, 1, 0]


def test_lattice_delta_goes_to_constant():
    Z = C0arObject(r=1)
    f = SchwartzC0ar.zeros(Z, **SMALL)
    c = f.coeffs.copy()
    c[SMALL["zbox"]] = 1
    g = fourier_c0ar(f.like(c), MeasureC0ar(Z))
    for th in (0.0, 0.13, 0.71):
        assert abs(g((), [], [th], []) - 1) < 1e-12


def test_inversion_and_transpose(rng):
    obj = C0arObject(FinAbGroup((2, 4)), 1, 1, 1)
    shape = SchwartzC0ar.zeros(obj, **SMALL).coeffs.shape
    f = SchwartzC0ar(obj, rng.normal(size=shape) + 1j * rng.normal(size=shape), **SMALL)
    mu = MeasureC0ar(obj, 0.8 - 0.3j)
    back = fourier_c0ar(fourier_c0ar(f, mu), mu.inverse())
    assert np.abs(back.coeffs - reflect_ar(f).coeffs).max() < 1e-9
    dshape = SchwartzC0ar.zeros(obj.dual(), **SMALL).coeffs.shape
    H = DistC0ar(obj, rng.normal(size=shape) + 0j, **SMALL)
    g = SchwartzC0ar(obj.dual(), rng.normal(size=dshape) + 0j, **SMALL)
    assert abs(H.pair(fourier_c0ar(g, mu.inverse())) - fourier_c0ar_dist(H, mu.inverse()).pair(g)) < 1e-9


def test_translations():
    T = C0arObject(p=1)
    f = SchwartzC0ar.zeros(T, **SMALL)
    c = f.coeffs.copy()
    c[SMALL["modes"] + 1] = 1
    f = f.like(c)
    g, _ = translate(f, theta=[0.5])
    assert abs(g((), [], [0.2], []) + f((), [], [0.2], [])) < 1e-12
    same, res = translate(f)
    assert np.array_equal(same.coeffs, f.coeffs) and res == 0
    Z = C0arObject(r=1)
    d = SchwartzC0ar.zeros(Z, **SMALL)
    c = d.coeffs.copy()
    c[SMALL["zbox"]] = 1
    moved, _ = translate(d.like(c), n=[-1])
    assert moved((), [1], [], []) == 1 and moved((), [0], [], []) == 0
    edge = d.coeffs.copy()
    edge[0] = 1          # f(n + 1) needs the value below the box
    with pytest.raises(CutoffOverflow):
        translate(d.like(edge), n=[1])


def _line_triple(role):
    G = FinAbGroup(())
    return AdmissibleTripleC0ar(AdmissibleTripleC0.from_subgroup(G, Subgroup.zero(G)), C0arObject(q=1), (role,))


def test_line_images():
    T = _line_triple("sub")
    f = SchwartzC0ar.zeros(T.G2, **SMALL)
    c = f.coeffs.copy()
    c[0] = 1
    out = images_c0ar(T, f.like(c), "epi_push", MeasureC0ar(T.G1))
    total = integrate.quad(lambda x: psi_oracle(0, x), -8, 8)[0]
    assert abs(out.coeffs.item() - total) < 1e-10
    with pytest.raises(ValueError):
        images_c0ar(_line_triple("quot"), f.like(c), "mono_push")
