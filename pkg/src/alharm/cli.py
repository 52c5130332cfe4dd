"""Batch runner: named verification suites, JSON scenarios and reports.

``alharm list`` prints the suites.  ``alharm run --suite NAME`` runs one,
optionally reading parameters from a JSON scenario::

    {"suite": "fourier2", "seed": 7, "tolerance": 1e-9,
     "params": {"boxes": [[2, [-1, 0, -1, 0]]]}, "output": "report.json"}

Command-line flags override the scenario.  Exit status is 0 when every case
passes, 1 when some case fails and 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

SCHEMA = "alharm-report/1"


class ConfigError(ValueError):
    """Invalid scenario or command line."""


# ---------------------------------------------------------------------------
# suites: each returns a list of (case name, thunk); a thunk returns a dict
# with ``max_deviation`` and/or ``defect``, optional ``checks`` (name -> bool),
# ``hypotheses`` and ``details``.


def _scalar(rng) -> complex:
    return complex(rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform()))


def _suite_fourier_c0(p, seed):
    from .finabel import MeasureC0, fourier_c0, random_function, random_group

    def case(k):
        rng = np.random.default_rng([seed, k])
        G = random_group(rng, p["max_order"])
        f = random_function(rng, G)
        mu = MeasureC0(G, _scalar(rng))
        back = fourier_c0(fourier_c0(f, mu), mu.inverse())
        dev = float(np.max(np.abs(back.values - f.reflect().values), initial=0.0))
        return {"max_deviation": dev, "hypotheses": {"moduli": list(G.moduli)}}

    return [(f"group-{k:03d}", lambda k=k: case(k)) for k in range(p["count"])]


def _suite_images_c0(p, seed):
    from .finabel import c0_identity_suite

    def case(k):
        devs = c0_identity_suite(np.random.default_rng([seed, k]), p["max_order"])
        return {"max_deviation": max(devs.values()), "details": devs}

    return [(f"configuration-{k:02d}", lambda k=k: case(k)) for k in range(p["count"])]


def _suite_poisson_c0(p, seed):
    from .finabel import MeasureC0, poisson_c0_check, random_triple

    def case(k):
        rng = np.random.default_rng([seed, k])
        T = random_triple(rng, p["max_order"])
        r = poisson_c0_check(T, MeasureC0(T.G1, _scalar(rng)), MeasureC0(T.G3.dual(), _scalar(rng)))
        return {"max_deviation": r["max_deviation"],
                "hypotheses": {"orders": [T.G1.order, T.G2.order, T.G3.order]}}

    return [(f"triple-{k:03d}", lambda k=k: case(k)) for k in range(p["count"])]


def _suite_archimed(p, seed):
    from .archimed import hermite_eigen_check, poisson_lattice_check

    def eigen():
        r = hermite_eigen_check(p["degrees"] + 1)
        return {"max_deviation": r["max_deviation"], "details": {"per_degree": r["per_degree"]}}

    def lattice(k):
        rng = np.random.default_rng([seed, k])
        M = int(rng.integers(1, p["degrees"] + 2))
        c = rng.normal(size=M) + 1j * rng.normal(size=M)
        r = poisson_lattice_check(c)
        return {"max_deviation": r["max_deviation"], "details": {"terms": r["N"], "degree": M - 1}}

    return ([("hermite-eigenrelation", eigen)]
            + [(f"lattice-poisson-{k}", lambda k=k: lattice(k)) for k in range(p["count"])])


def _suite_harm1(p, seed):
    from .filt1 import coordinate_triple, laurent_object
    from .harm1 import (DistC1, MeasureLine1, SchwartzC1, dual_object, fourier1, fourier1_dist,
                        pairing1, poisson1_check)

    def inversion(q, lo, hi, k):
        rng = np.random.default_rng([seed, k])
        E = laurent_object(q, lo, hi)
        dev = 0.0
        for a in range(lo, hi + 1):
            for b in range(a, hi + 1):
                Q, _, _ = E.window_data(a, b)
                f = SchwartzC1(E, a, b, rng.normal(size=Q.shape) + 1j * rng.normal(size=Q.shape))
                mu = MeasureLine1(E, _scalar(rng))
                g = fourier1(f, mu)
                back = fourier1(g, mu.inverse())
                dev = max(dev, float(np.abs(back.lifted() - f.reflect().lifted()).max()))
                H = DistC1(dual_object(E), rng.normal(size=E.ambient.shape) + 0j)
                dev = max(dev, abs(pairing1(g, H) - pairing1(f, fourier1_dist(H, mu))))
        return {"max_deviation": dev}

    def poisson(q, split, sub, k):
        rng = np.random.default_rng([seed, k])
        T = coordinate_triple(laurent_object(q, -2, 2), split, sub)
        r = poisson1_check(T, MeasureLine1(T.E1, _scalar(rng)), MeasureLine1(dual_object(T.E3), _scalar(rng)))
        return {"max_deviation": r["max_deviation"]}

    cases = []
    for k, (q, lo, hi) in enumerate(((2, -3, 3), (3, -2, 2))):
        cases.append((f"inversion-F{q}", lambda q=q, lo=lo, hi=hi, k=k: inversion(q, lo, hi, k)))
    k = 10
    for q in (2, 3):
        for split in (-1, 0, 1):
            for sub in ("upper", "lower"):
                cases.append((f"poisson-F{q}-{sub}{split:+d}",
                              lambda q=q, s=split, u=sub, k=k: poisson(q, s, u, k)))
                k += 1
    return cases


def _box(spec, field):
    from .filt2 import Box

    try:
        a0, a1, b0, b1 = (int(x) for x in spec)
    except (TypeError, ValueError):
        raise ConfigError(f"{field}: a box is [a0, a1, b0, b1]") from None
    if a1 < a0 or b1 < b0:
        raise ConfigError(f"{field}: empty box {spec}")
    if not a0 <= 0 <= a1 + 1:
        raise ConfigError(f"{field}: box must satisfy a0 <= 0 <= a1 + 1")
    return Box(a0, a1, b0, b1)


def _suite_boxes(p, seed):
    from .filt2 import (Automorphism2, FilteredObject2, Region, check_aut, dual2, levelwise_product_orders,
                        predicates2)
    from .harm2 import base_change_square

    q = p["q"]
    box = _box(p["box"], "params.box")
    regions = {"plane": Region.plane(), "upper": Region.rect(b0=1), "lower": Region.rect(b1=0),
               "right": Region.rect(a0=0), "left": Region.rect(a1=-1),
               "strip": Region.rect(a0=-1, a1=0, b0=-1, b1=0) | Region.rect(b0=1)}

    def duality(name):
        E = FilteredObject2(q, regions[name], box)
        D = dual2(E)
        pe, pd = predicates2(E), predicates2(D)
        return {"defect": 0, "hypotheses": pe,
                "checks": {"involution": dual2(D) == E, "c_to_d": pe["c"] == pd["d"], "d_to_c": pe["d"] == pd["c"],
                           "cf_to_df": pe["cf"] == pd["df"], "df_to_cf": pe["df"] == pd["cf"]}}

    def products(k):
        sq = base_change_square(q, k, box)
        rows = levelwise_product_orders(sq["main"], sq["right"].E1)
        bad = sum(r["product"] != r["coordinate"] or r["product"] != r["formula"] for r in rows)
        return {"defect": bad, "details": {"levels": rows}}

    def automorphism(name, g):
        E = FilteredObject2(q, Region.plane(), box)
        r = check_aut(g, E)
        return {"defect": 0, "checks": {"aut_prime": r["aut_prime"], "star": r["star"]}}

    cases = [(f"duality-{n}", lambda n=n: duality(n)) for n in regions]
    cases += [(f"fibered-product-{k}", lambda k=k: products(k)) for k in (1, 3, 9, 11)]
    for name, g in (("shift-t", Automorphism2(beta=1)), ("shift-u", Automorphism2(alpha=1)),
                    ("scalar", Automorphism2(scalar=q - 1 if q > 2 else 1))):
        cases.append((f"automorphism-{name}", lambda n=name, g=g: automorphism(n, g)))
    return cases


def _suite_vmeas(p, seed):
    from .filt2 import Automorphism2, FilteredObject2, Region, dual2
    from .vmeas import (VirtualMeasure, canonical_delta, canonical_one, compose_gamma, dual_transport, invert,
                        lg_ratio, lg_ratio_window)

    q = p["q"]
    box = _box(p["box"], "params.box")
    E = FilteredObject2(q, Region.plane(), box)

    def gamma():
        rng = np.random.default_rng([seed, 0])
        lv = [int(x) for x in rng.integers(-2, 3, size=4)]
        s = [Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 9))) for _ in range(3)]
        m = [VirtualMeasure(E, lv[k], lv[k + 1], s[k]) for k in range(3)]
        left = compose_gamma(compose_gamma(m[0], m[1]), m[2])
        right = compose_gamma(m[0], compose_gamma(m[1], m[2]))
        unit = compose_gamma(m[0], invert(m[0]))
        return {"defect": 0, "checks": {"associative": left == right, "inverse": unit.scalar == 1}}

    def canonical():
        Ec = FilteredObject2(q, Region.rect(a0=-2), box)
        Ed = FilteredObject2(q, Region.rect(a1=1), box)
        one = canonical_one(Ec, 0, 2)
        delta = canonical_delta(Ed, 0, 2)
        chain = compose_gamma(canonical_one(Ec, 0, 1), canonical_one(Ec, 1, 2))
        # rows {a >= -2} have reference volume q^2; points of rows {a <= 1} have mass q^-2
        return {"defect": 0, "details": {"one": str(one.scalar), "delta": str(delta.scalar)},
                "checks": {"one_chains": chain.scalar == one.scalar,
                           "one_is_compact_volume": one.scalar == Fraction(q) ** -4,
                           "delta_is_counting": delta.scalar == Fraction(q) ** 4,
                           "dual_is_counting": dual_transport(one) == canonical_delta(dual2(Ec), 0, -2)}}

    def transport():
        bad = 0
        for g in (Automorphism2(beta=1), Automorphism2(alpha=1), Automorphism2(alpha=-1, beta=1),
                  Automorphism2(alpha=1, beta=-1)):
            for i, j in ((0, 1), (1, 0), (-1, 1)):
                bad += lg_ratio(g, E, i, j) != lg_ratio_window(g, E, i, j)
        m = VirtualMeasure(E, 0, 2, Fraction(3, 5))
        back = dual_transport(dual_transport(m))
        return {"defect": int(bad), "checks": {"dual_involution": back == m}}

    return [("gamma-associativity", gamma), ("canonical-elements", canonical), ("transport-ratios", transport)]


def _suite_fourier2(p, seed):
    from .harm2 import fourier2_check

    cases = []
    for k, entry in enumerate(p["boxes"]):
        try:
            q, spec = int(entry[0]), entry[1]
        except (TypeError, ValueError, IndexError):
            raise ConfigError("params.boxes: entries are [q, [a0, a1, b0, b1]]") from None
        box = _box(spec, f"params.boxes[{k}]")

        def case(q=q, box=box, k=k):
            r = fourier2_check(q, box, np.random.default_rng([seed, k]))
            return {"max_deviation": r["max_deviation"],
                    "details": {"route": r["route"], "inversion": r["inversion"], "adjoint": r["adjoint"]}}

        cases.append((f"F{q}-box-{box.a1 - box.a0 + 1}x{box.b1 - box.b0 + 1}-{k}", case))
    return cases


def _split_triples(q, box):
    from .filt2 import AdmissibleTriple2, FilteredObject2, Region

    E = FilteredObject2(q, Region.plane(), box)
    return AdmissibleTriple2.split(E, Region.rect(b0=1)), AdmissibleTriple2.split(E, Region.rect(a0=0))


def _suite_images2(p, seed):
    from .harm2 import adjointness_check, fourier_image_check

    q = p["q"]
    Tc, Tf = _split_triples(q, _box(p["box"], "params.box"))
    modes = {"beta_lower": Tc, "alpha_upper": Tc, "beta_upper": Tf, "alpha_lower": Tf}

    def adj(mode, k):
        r = adjointness_check(modes[mode], mode, np.random.default_rng([seed, k]))
        return {"max_deviation": r["max_deviation"]}

    def square(s):
        r = fourier_image_check(Tc if s <= 4 else Tf, s, np.random.default_rng([seed, 100 + s]))
        return {"max_deviation": r["max_deviation"]}

    cases = [(f"adjoint-{m}", lambda m=m, k=k: adj(m, k)) for k, m in enumerate(modes)]
    cases += [(f"fourier-square-{s}", lambda s=s: square(s)) for s in range(1, 9)]
    return cases


def _suite_basechange(p, seed):
    from .harm2 import BASE_CHANGE_IDENTITIES, base_change2_check

    q = p["q"]
    box = _box(p["box"], "params.box")

    def case(k):
        r = base_change2_check(k, q, np.random.default_rng([seed, k]), box)
        return {"max_deviation": r["max_deviation"], "hypotheses": r["hypotheses"],
                "details": {"scale": r["scale"], "probes": r["probe_count"]}}

    return [(f"{k:02d}-{BASE_CHANGE_IDENTITIES[k - 1]}", lambda k=k: case(k)) for k in range(1, 17)]


def _suite_centext(p, seed):
    from .centext import (commutator, fourier_equivariance_check, identity, inv, lift, mul, pairing_invariance,
                          rep_R)
    from .filt2 import Automorphism2, FilteredObject2, Region, make_local_field2
    from .harm2 import DistC2, SchwartzC2, deviation

    q = p["q"]
    t, u = Automorphism2(beta=1), Automorphism2(alpha=1)

    def axioms():
        E = make_local_field2(q, (-2, 1), (-2, 1))
        x = lift(t, E, 0, 2)
        y = lift(u, E, 0, Fraction(3, 7))
        z = lift(Automorphism2(alpha=-1, beta=1, scalar=q - 1 if q > 2 else 1), E, 0, 5)
        e = identity(E, 0)
        return {"defect": 0, "checks": {
            "associative": mul(mul(x, y), z).key() == mul(x, mul(y, z)).key(),
            "left_inverse": mul(inv(x), x).key() == e.key(),
            "right_inverse": mul(x, inv(x)).key() == e.key(),
            "unit": mul(e, y).key() == y.key() == mul(y, e).key()}}

    def commutators():
        vals = []
        for bx in ((-2, 1, -2, 1), (-3, 2, -1, 1)):
            E = FilteredObject2(q, Region.plane(), _box(bx, "box"))
            for s1, s2 in ((1, 1), (7, Fraction(1, 5)), (Fraction(2, 3), 4)):
                vals.append(commutator(lift(t, E, 0, s1), lift(u, E, 0, s2)))
        return {"defect": 0, "details": {"value": str(vals[0])},
                "checks": {"lift_independent": len(set(vals)) == 1}}

    def representation():
        rng = np.random.default_rng([seed, 1])
        E = FilteredObject2(2, Region.plane(), _box((-2, 1, -1, 1), "box"))
        f = SchwartzC2(E, rng.normal(size=E.shape) + 0j, 1.3, 0)
        H = DistC2(E, rng.normal(size=E.shape) + 0j, 0.4, 0)
        g1, g2 = lift(t, E, 0, 2.0), lift(u, E, 0, 0.5)
        g3 = lift(Automorphism2(alpha=-1, beta=-1), E, 0, 3)
        rr = deviation(rep_R(g1, rep_R(g2, f)), rep_R(mul(g1, g2), f))
        inv_dev = max(pairing_invariance(g, f, H) for g in (g1, g2, g3))
        eq = max(fourier_equivariance_check(g, f)["max_deviation"] for g in (g1, g2, g3))
        Eq = FilteredObject2(3, Region.plane(), _box((-1, 1, -1, 0), "box"))
        g = lift(Automorphism2(alpha=1, scalar=2), Eq, 0, 2)
        H3 = DistC2(Eq, rng.normal(size=Eq.shape) + 0j, 1, 0)
        eq = max(eq, fourier_equivariance_check(g, H3)["max_deviation"])
        return {"max_deviation": max(rr, inv_dev, eq),
                "details": {"composition": rr, "pairing_invariance": inv_dev, "fourier_equivariance": eq},
                "checks": {"composition_1e-12": rr <= 1e-12, "pairing_1e-12": inv_dev <= 1e-12}}

    return [("group-axioms", axioms), ("commutator", commutators), ("representation", representation)]


def _suite_poisson2(p, seed):
    from .centext import lift, poisson2_twisted_check
    from .filt2 import Automorphism2, bottom_level, top_level
    from .harm2 import poisson2_I_check, poisson2_II_check, poisson2_reduction_check
    from .vmeas import VirtualMeasure

    q = p["q"]
    box = _box(p["box"], "params.box")
    Tc, Tf = _split_triples(q, box)

    def measures(k):
        rng = np.random.default_rng([seed, k])
        o = int(rng.integers(-1, 2))
        return (o, VirtualMeasure(Tc.E1, o, top_level(Tc.E1), rng.uniform(0.5, 2)),
                VirtualMeasure(Tc.E3, o, bottom_level(Tc.E3), rng.uniform(0.5, 2)))

    def first():
        _, mu, nu = measures(0)
        r = poisson2_I_check(Tc, mu, nu)
        return {"max_deviation": max(r["max_deviation"], r["lemma_deviation"]),
                "hypotheses": r["hypotheses"], "details": {"lemma_deviation": r["lemma_deviation"]}}

    def second(o):
        r = poisson2_II_check(Tf, o)
        return {"max_deviation": max(r["max_deviation"], r["lemma_deviation"]), "hypotheses": r["hypotheses"]}

    def twisted(name, g, s):
        o, mu, nu = measures(1)
        gt = lift(g, Tc.E2, o, s)
        r = poisson2_twisted_check(Tc, mu, nu, gt)
        return {"max_deviation": r["max_deviation"], "hypotheses": r["hypotheses"],
                "checks": {"star": r["star"]}}

    def reduction():
        return {"max_deviation": poisson2_reduction_check(q)["max_deviation"]}

    cases = [("poisson-I", first)]
    cases += [(f"poisson-II-o{o:+d}", lambda o=o: second(o)) for o in (-2, 0, 1, 3)]
    for name, g, s in (("shift-t", Automorphism2(beta=1), 2.0), ("shift-u", Automorphism2(alpha=1), 0.5),
                       ("diagonal", Automorphism2(alpha=-1, beta=-1), 3.0)):
        cases.append((f"twisted-{name}", lambda n=name, g=g, s=s: twisted(n, g, s)))
    cases.append(("one-cell-reduction", reduction))
    return cases


def _suite_adelic_curve(p, seed):
    from .adelic import (adelic_complex_curve, curve_h0_bruteforce, curve_h1_bruteforce,
                         curve_quotient_sequence_check)

    def cohomology(q, n):
        r = adelic_complex_curve(q, n, max(n + 3, 1))
        b0, b1 = curve_h0_bruteforce(q, n), curve_h1_bruteforce(q, n)
        return {"defect": abs(r["h0"] - b0) + abs(r["h1"] - b1),
                "details": {"h0": r["h0"], "h1": r["h1"], "oracle": [b0, b1]},
                "checks": {"riemann_roch": r["h0"] - r["h1"] == n + 1}}

    def sequence(q, pt, L):
        r = curve_quotient_sequence_check(q, pt, L)
        return {"defect": r["defect"], "details": {"dims": r["dims"], "defects": r["defects"]},
                "checks": {"compact": all(r["compact"].values())}}

    cases = []
    for q in p["qs"]:
        for n in range(p["n_min"], p["n_max"] + 1):
            cases.append((f"cohomology-F{q}-n{n:+d}", lambda q=q, n=n: cohomology(q, n)))
    for q in p["qs"]:
        for pt in (None, 0):
            for L in range(p["max_level"] + 1):
                cases.append((f"sequence-F{q}-p{'inf' if pt is None else pt}-L{L}",
                              lambda q=q, pt=pt, L=L: sequence(q, pt, L)))
    return cases


def _suite_adelic_surface(p, seed):
    from .adelic import surface_quotient_dimension, surface_reduction_check

    def box(q, N):
        d = surface_quotient_dimension(q, N)
        return {"defect": abs(d - N * N), "details": {"dimension": d}}

    def reduction(q, N):
        r = surface_reduction_check(q, N)
        dims = r["dims"]
        return {"defect": sum(abs(dims[k] - dims["expected"]) for k in ("all_places", "two_fields", "single_field"))
                + r["lemma"]["defect"],
                "details": {"dims": dims, "curve_degree_bound": r["bx"]["degree_bound"],
                            "bx_enlarged_in_window": r["bx"]["enlarged"]}}

    cases = [(f"box-F{q}-N{N}", lambda q=q, N=N: box(q, N))
             for q in p["qs"] for N in range(p["max_box"] + 1)]
    cases += [(f"reduction-F{q}-N{N}", lambda q=q, N=N: reduction(q, N))
              for q in p["qs"] for N in range(p["max_reduction"] + 1)]
    return cases


def _suite_adelic_numberfield(p, seed):
    from .adelic import number_field_desk_check

    def case(inst):
        r = number_field_desk_check(inst["primes"], inst["moduli"])
        checks = {**{f"surjective_{k}": v for k, v in r["surjective"].items()}, **r["structure"], **r["duality"]}
        return {"defect": 0, "checks": checks, "details": {"step_orders": r["step_orders"]}}

    cases = []
    for k, inst in enumerate(p["instances"]):
        if not isinstance(inst, dict) or set(inst) != {"primes", "moduli"}:
            raise ConfigError(f"params.instances[{k}]: expected {{'primes': [...], 'moduli': [...]}}")
        label = "x".join(str(m) for m in inst["moduli"]) or "empty"
        cases.append((f"Q-{label}", lambda inst=inst: case(inst)))
    return cases


def _suite_analogy(p, seed):
    from .adelic import arithmetic_analogy_series

    def case(N):
        r = arithmetic_analogy_series(N)
        return {"defect": 0, "details": {"series": [s["kind"] for s in r["series"]]},
                "checks": {"pattern": r["pattern"], "circle_dual_is_Z": r["circle_dual_is_Z"],
                           "c_object": r["c_object"], "cf_object": r["cf_object"]}}

    return [(f"window-{N}", lambda N=N: case(N)) for N in range(p["max_window"] + 1)]


_BOX = [-2, 1, -2, 1]
SUITES = {
    "fourier-c0": (_suite_fourier_c0, {"count": 200, "max_order": 4096}),
    "images-c0": (_suite_images_c0, {"count": 10, "max_order": 1024}),
    "poisson-c0": (_suite_poisson_c0, {"count": 100, "max_order": 1024}),
    "archimed": (_suite_archimed, {"degrees": 12, "count": 5}),
    "harm1": (_suite_harm1, {}),
    "boxes": (_suite_boxes, {"q": 2, "box": _BOX}),
    "vmeas": (_suite_vmeas, {"q": 3, "box": _BOX}),
    "fourier2": (_suite_fourier2, {"boxes": [[2, [-1, 0, -1, 0]], [3, [-1, 1, -1, 0]],
                                             [2, [-2, 1, -2, 1]], [3, [-2, 1, -2, 1]]]}),
    "images2": (_suite_images2, {"q": 2, "box": [-1, 1, -1, 1]}),
    "basechange": (_suite_basechange, {"q": 2, "box": _BOX}),
    "centext": (_suite_centext, {"q": 3}),
    "poisson2": (_suite_poisson2, {"q": 2, "box": [-1, 1, -1, 1]}),
    "adelic-curve": (_suite_adelic_curve, {"qs": [2, 3], "n_min": -3, "n_max": 6, "max_level": 3}),
    "adelic-surface": (_suite_adelic_surface, {"qs": [2, 3], "max_box": 8, "max_reduction": 2}),
    "adelic-numberfield": (_suite_adelic_numberfield,
                           {"instances": [{"primes": [2, 3], "moduli": [8, 9]}, {"primes": [], "moduli": []},
                                          {"primes": [5, 7], "moduli": [25, 7]}]}),
    "analogy": (_suite_analogy, {"max_window": 4}),
}


def list_suites() -> list[str]:
    return list(SUITES)


def _params(suite: str, given: dict) -> dict:
    defaults = SUITES[suite][1]
    if not isinstance(given, dict):
        raise ConfigError("params: expected an object")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"params.{unknown[0]}: unknown parameter for suite {suite!r}")
    out = dict(defaults)
    for k, v in given.items():
        d = defaults[k]
        if isinstance(d, int) and not isinstance(d, bool):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"params.{k}: expected an integer")
            if v < 0 and k not in ("n_min", "n_max"):
                raise ConfigError(f"params.{k}: must be nonnegative")
        elif isinstance(d, list) and not isinstance(v, list):
            raise ConfigError(f"params.{k}: expected a list")
        out[k] = v
    for k in ("q",):
        if k in out and out[k] not in (2, 3, 5, 7):
            raise ConfigError(f"params.{k}: expected a small prime")
    for q in out.get("qs", []):
        if q not in (2, 3, 5, 7):
            raise ConfigError("params.qs: expected small primes")
    return out


def _json_safe(x):
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return str(x)
    if x is None or isinstance(x, str):
        return x
    return repr(x)


def run_suite(suite: str, params: dict | None = None, seed: int = 0, tolerance: float = 1e-9) -> dict:
    """Run a suite; returns ``{"schema", "body", "runtime_ms"}``.

    ``body`` depends only on the inputs; wall-clock times live apart from it.
    """
    if suite not in SUITES:
        raise ConfigError(f"suite: unknown suite {suite!r}")
    if not isinstance(tolerance, (int, float)) or isinstance(tolerance, bool) or not tolerance > 0:
        raise ConfigError("tolerance: must be a positive number")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed: must be a nonnegative integer")
    p = _params(suite, params or {})
    cases = SUITES[suite][0](p, seed)
    records, times = [], {}
    t_all = time.perf_counter()
    for name, thunk in cases:
        t0 = time.perf_counter()
        try:
            r = thunk()
            error = None
        except Exception as exc:       # a crashing case is a failing case
            r, error = {}, f"{type(exc).__name__}: {exc}"
        times[name] = round((time.perf_counter() - t0) * 1000, 3)
        rec = {"name": name, "hypotheses": r.get("hypotheses", {})}
        ok = error is None
        if "max_deviation" in r:
            rec["max_deviation"] = float(r["max_deviation"])
            ok = ok and rec["max_deviation"] <= tolerance
        if "defect" in r:
            rec["defect"] = int(r["defect"])
            ok = ok and rec["defect"] == 0
        if "checks" in r:
            rec["checks"] = r["checks"]
            ok = ok and all(r["checks"].values())
        if "details" in r:
            rec["details"] = r["details"]
        if error:
            rec["error"] = error
        rec["passed"] = bool(ok)
        records.append(_json_safe(rec))
    body = {"suite": suite, "seed": seed, "tolerance": tolerance, "params": _json_safe(p),
            "cases": records, "passed": all(r["passed"] for r in records)}
    return {"schema": SCHEMA, "body": body,
            "runtime_ms": {"total": round((time.perf_counter() - t_all) * 1000, 3), "cases": times}}


def body_bytes(report: dict) -> bytes:
    """Canonical serialization of the deterministic part of a report."""
    return json.dumps(report["body"], sort_keys=True, separators=(",", ":")).encode()


def _load_scenario(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON at line {exc.lineno}") from None
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    unknown = sorted(set(data) - {"suite", "params", "seed", "tolerance", "output"})
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown scenario field")
    return data


def _summary(report: dict) -> str:
    body = report["body"]
    lines = []
    for r in body["cases"]:
        measure = (f"dev={r['max_deviation']:.2e}" if "max_deviation" in r
                   else f"defect={r.get('defect', 0)}")
        tag = "PASS" if r["passed"] else "FAIL"
        extra = f"  {r['error']}" if "error" in r else ""
        lines.append(f"  {tag}  {r['name']:<40} {measure}{extra}")
    n = len(body["cases"])
    k = sum(r["passed"] for r in body["cases"])
    lines.append(f"{body['suite']}: {k}/{n} cases passed in {report['runtime_ms']['total'] / 1000:.2f} s")
    return "\n".join(lines)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="alharm", description="Run harmonic-analysis verification suites.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list the suites")
    run = sub.add_parser("run", help="run one suite")
    run.add_argument("--suite")
    run.add_argument("--config")
    run.add_argument("--report")
    run.add_argument("--tol", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--quiet", action="store_true", help="only print the final line")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command == "list":
        print("\n".join(list_suites()))
        return 0
    try:
        scen = _load_scenario(args.config) if args.config else {}
        suite = args.suite or scen.get("suite")
        if suite is None:
            raise ConfigError("suite: missing (use --suite or a scenario file)")
        if args.suite and scen.get("suite") not in (None, args.suite):
            raise ConfigError("suite: --suite disagrees with the scenario file")
        seed = args.seed if args.seed is not None else scen.get("seed", 0)
        tol = args.tol if args.tol is not None else scen.get("tolerance", 1e-9)
        report = run_suite(suite, scen.get("params", {}), seed, tol)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = args.report or scen.get("output")
    if out:
        with open(out, "w") as fh:
            json.dump(report, fh, indent=1, sort_keys=True)
            fh.write("\n")
    text = _summary(report)
    print(text.splitlines()[-1] if args.quiet else text)
    return 0 if report["body"]["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
