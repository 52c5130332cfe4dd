import json
import subprocess
import sys

import pytest

from alharm.cli import SCHEMA, ConfigError, body_bytes, list_suites, main, run_suite

SUITES = ["fourier-c0", "images-c0", "poisson-c0", "archimed", "harm1", "boxes", "vmeas", "fourier2", "images2",
          "basechange", "centext", "poisson2", "adelic-curve", "adelic-surface", "adelic-numberfield", "analogy"]


def test_list():
    assert list_suites() == SUITES


def test_list_command(capsys):
    assert main(["list"]) == 0
    assert capsys.readouterr().out.split() == SUITES


def test_report_shape():
    r = run_suite("analogy", {"max_window": 1}, seed=3)
    assert r["schema"] == SCHEMA
    body = r["body"]
    assert body["suite"] == "analogy" and body["passed"] and len(body["cases"]) == 2
    assert set(r["runtime_ms"]["cases"]) == {c["name"] for c in body["cases"]}
    for case in body["cases"]:
        assert {"name", "hypotheses", "passed"} <= set(case)
        assert "max_deviation" in case or "defect" in case


def test_fixed_seed_gives_identical_bodies():
    a = run_suite("poisson-c0", {"count": 20}, seed=9)
    b = run_suite("poisson-c0", {"count": 20}, seed=9)
    c = run_suite("poisson-c0", {"count": 20}, seed=10)
    assert body_bytes(a) == body_bytes(b)
    assert body_bytes(a) != body_bytes(c)


def test_seed_changes_random_instances_only_through_cases():
    a = run_suite("fourier-c0", {"count": 5}, seed=1)["body"]["cases"]
    b = run_suite("fourier-c0", {"count": 8}, seed=1)["body"]["cases"]
    # per-case streams: growing the count keeps earlier cases
    assert a == b[:5]


@pytest.mark.parametrize("params, field", [({"cont": 3}, "params.cont"), ({"count": "x"}, "params.count"),
                                           ({"count": -1}, "params.count")])
def test_parameter_errors_name_the_field(params, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        run_suite("fourier-c0", params)


def test_other_config_errors():
    with pytest.raises(ConfigError, match="suite"):
        run_suite("nope")
    with pytest.raises(ConfigError, match="tolerance"):
        run_suite("analogy", tolerance=0)
    with pytest.raises(ConfigError, match="seed"):
        run_suite("analogy", seed=-1)
    with pytest.raises(ConfigError, match=r"params\.boxes\[0\]"):
        run_suite("fourier2", {"boxes": [[2, [1, 0, 0, 0]]]})
    with pytest.raises(ConfigError, match=r"params\.box"):
        run_suite("basechange", {"box": [1, 2, 0, 0]})


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "--suite", "analogy", "--quiet"]) == 0
    assert main(["run", "--suite", "basechange", "--tol", "1e-30", "--quiet"]) == 1
    assert main(["run", "--suite", "nope"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["run"]) == 2
    assert "suite" in capsys.readouterr().err


def test_scenario_file_and_report(tmp_path):
    scen = tmp_path / "scenario.json"
    out = tmp_path / "report.json"
    scen.write_text(json.dumps({"suite": "fourier2", "seed": 4, "tolerance": 1e-9,
                                "params": {"boxes": [[2, [-1, 0, -1, 0]]]}, "output": str(out)}))
    assert main(["run", "--config", str(scen), "--quiet"]) == 0
    rep = json.loads(out.read_text())
    assert rep["body"]["seed"] == 4 and len(rep["body"]["cases"]) == 1
    # flags override the scenario
    out2 = tmp_path / "r2.json"
    assert main(["run", "--config", str(scen), "--seed", "5", "--report", str(out2), "--quiet"]) == 0
    assert json.loads(out2.read_text())["body"]["seed"] == 5
    scen.write_text(json.dumps({"suite": "analogy", "extra": 1}))
    assert main(["run", "--config", str(scen)]) == 2


def test_failing_case_is_reported_not_raised(monkeypatch):
    import alharm.cli as cli

    def broken(p, seed):
        return [("ok", lambda: {"defect": 0}), ("boom", lambda: 1 / 0)]

    monkeypatch.setitem(cli.SUITES, "analogy", (broken, {}))
    r = run_suite("analogy")
    assert [c["passed"] for c in r["body"]["cases"]] == [True, False]
    assert "ZeroDivisionError" in r["body"]["cases"][1]["error"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "alharm", "run", "--suite", "vmeas"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "vmeas: 3/3" in res.stdout
