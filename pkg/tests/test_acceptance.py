"""Acceptance criteria at their stated tolerances and time limits.

Each criterion records one PASS/FAIL line; the lines are printed at the end
of the pytest session and when this file is run as a script.
"""

import time

import pytest

from alharm.cli import body_bytes, main, run_suite

LINES: list[str] = []


def _suites(names, tol, params=None, seed=0):
    reports, t0 = [], time.perf_counter()
    for name in names:
        reports.append(run_suite(name, (params or {}).get(name, {}), seed=seed, tolerance=tol))
    return reports, time.perf_counter() - t0


def _worst(reports):
    devs = [c["max_deviation"] for r in reports for c in r["body"]["cases"] if "max_deviation" in c]
    defects = [c["defect"] for r in reports for c in r["body"]["cases"] if "defect" in c]
    return max(devs, default=0.0), sum(defects)


def _record(number, title, ok, detail):
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}")
    return ok


def _suite_criterion(number, title, names, tol, limit=None, params=None):
    reports, secs = _suites(names, tol, params)
    dev, defect = _worst(reports)
    cases = sum(len(r["body"]["cases"]) for r in reports)
    ok = all(r["body"]["passed"] for r in reports) and (limit is None or secs < limit)
    bound = f" < {limit:g} s" if limit else ""
    return _record(number, title, ok, f"{cases} cases, max dev {dev:.1e}, defects {defect}, "
                                      f"{secs:.2f} s{bound}")


def criterion_1():
    return _suite_criterion(1, "Fourier inversion on 200 groups of order <= 4096", ["fourier-c0"], 1e-9, 10)


def criterion_2():
    return _suite_criterion(2, "finite Poisson formula on 100 triples of order <= 1024", ["poisson-c0"], 1e-9)


def criterion_3():
    return _suite_criterion(3, "finite base-change, composition and Fourier-image identities", ["images-c0"],
                            1e-9, 30)


def criterion_4():
    return _suite_criterion(4, "Hermite eigenrelation (degrees <= 12) and lattice Poisson", ["archimed"], 1e-10,
                            20)


def criterion_5():
    return _suite_criterion(5, "two-level Fourier inversion and adjointness, boxes up to 4x4", ["fourier2"],
                            1e-9, 60)


def criterion_6():
    return _suite_criterion(6, "Poisson I/II, two-route lemmas and twisted formulas", ["poisson2"], 1e-9)


def criterion_7():
    return _suite_criterion(7, "sixteen two-level base-change and composition identities", ["basechange"], 1e-9)


def criterion_8():
    reports, secs = _suites(["centext"], 1e-9)
    cases = {c["name"]: c for c in reports[0]["body"]["cases"]}
    d = cases["representation"]["details"]
    ok = (reports[0]["body"]["passed"] and d["composition"] <= 1e-12 and d["pairing_invariance"] <= 1e-12
          and d["fourier_equivariance"] <= 1e-9)
    return _record(8, "central extension axioms, representation, equivariance, commutator", ok,
                   f"composition {d['composition']:.1e}, invariance {d['pairing_invariance']:.1e}, "
                   f"equivariance {d['fourier_equivariance']:.1e}, "
                   f"commutator {cases['commutator']['details']['value']}, {secs:.2f} s")


def criterion_9():
    return _suite_criterion(9, "adelic curve, surface, number field and analogy checks",
                            ["adelic-curve", "adelic-surface", "adelic-numberfield", "analogy"], 1e-9, 60)


def criterion_10():
    a = run_suite("poisson2", seed=17)
    b = run_suite("poisson2", seed=17)
    same = body_bytes(a) == body_bytes(b)
    codes = (main(["run", "--suite", "analogy", "--quiet"]),
             main(["run", "--suite", "basechange", "--tol", "1e-30", "--quiet"]),
             main(["run", "--suite", "no-such-suite"]))
    ok = same and codes == (0, 1, 2)
    return _record(10, "runner determinism and exit codes", ok,
                   f"identical bodies {same}, exit codes {codes} (want (0, 1, 2))")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 11)])
def test_criterion(criterion):
    assert criterion(), LINES[-1]


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print("\n".join(LINES))
    raise SystemExit(0 if all(results) else 1)
