import json

import numpy as np
import pytest

from ncmaj.errors import InvalidInputError
from ncmaj.lab import REGISTRY, ExperimentReport, cyclic_matrices, integer_boolean_trace4, run

SMALL = {
    "counterexample-wigner": dict(m=3, n=50, samples=20),
    "counterexample-cyclic": dict(n=3, samples=500),
    "hyper": dict(instances=3, m=4, samples=300),
    "majorize": dict(ps=(8, 16), samples=300, m=6),
    "chop": dict(ps=(8, 16), samples=300, m=4),
    "noise-stability": dict(m=5, p=8, samples=300),
    "anticoncentration": dict(m=4, p=8, samples=300, points=5),
    "ncgi-opt": dict(instances=1, restarts=3),
    "psd-variant": dict(instances=2, restarts=3, draws=10),
    "dict-test": dict(instances=2, m=3),
    "kd-estimate": dict(d=1, samples=10_000),
    "ensemble-check": dict(samples=200),
}


def test_registry_names():
    assert set(REGISTRY) == set(SMALL)
    for exp in REGISTRY.values():
        assert exp.summary and "seed" not in exp.defaults


@pytest.mark.parametrize("name", sorted(SMALL))
def test_every_experiment_runs_and_reproduces(name):
    a = run(name, seed=3, workers=1, **SMALL[name])
    b = run(name, seed=3, workers=2, **SMALL[name])
    assert a.verdict in ("pass", "fail", "report-only")
    assert a.dumps(with_timings=False) == b.dumps(with_timings=False)
    obj = json.loads(a.dumps())
    assert set(obj) == {"experiment", "config", "seed", "results", "checks", "verdict", "timings"}
    assert obj["config"] == json.loads(json.dumps(a.config))
    for r in obj["results"]:
        assert "label" in r and "provenance" in r and ("value" in r or "mean" in r)


def test_unknown_inputs_rejected():
    with pytest.raises(InvalidInputError):
        run("nope")
    with pytest.raises(InvalidInputError):
        run("kd-estimate", bogus=1)


def test_verdict_rules():
    rep = ExperimentReport("x", {}, 0)
    assert rep.verdict == "report-only"
    rep.check("soft", False, hard=False)
    assert rep.verdict == "report-only"
    rep.check("a", True)
    assert rep.verdict == "pass"
    rep.check("b", False)
    assert rep.verdict == "fail" and [c["name"] for c in rep.failed_checks()] == ["b"]


def test_report_cleans_numpy_values():
    rep = ExperimentReport("x", {"ps": (np.int64(2),)}, 0)
    rep.add("a", np.float64(1.5))
    rep.add("b", np.arange(2))
    rep.add("c", 1 + 2j)
    obj = json.loads(rep.dumps())
    assert obj["config"] == {"ps": [2]}
    assert [r["value"] for r in obj["results"]] == [1.5, [0, 1], [1.0, 2.0]]
    with pytest.raises(KeyError):
        rep.result("missing")


@pytest.mark.parametrize("m", [2, 3, 5, 10])
def test_wigner_boolean_value(m):
    rep = run("counterexample-wigner", seed=0, m=m, n=50, samples=10)
    assert rep.result("boolean fourth moment")["value"] == pytest.approx(3 - 2 / m, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_cyclic_integer_path(n):
    A, B, C = cyclic_matrices(n)
    for j in range(n):
        assert np.trace(C[j]) == 1
        for k in range(n):
            if j != k:
                assert not (C[j] @ C[k]).any()
    total, count = integer_boolean_trace4(C)
    assert total == n * count
    literal = [np.linalg.matrix_power(B, i) @ A for i in range(n)]
    total, count = integer_boolean_trace4(literal)
    assert total == n * n * count


def test_cyclic_n2_haar_near_three():
    rep = run("counterexample-cyclic", seed=0, n=2, samples=5000)
    est = rep.result("haar Tr fourth moment")
    assert abs(est["mean"] - 3) <= 3 * est["stderr"]
    assert rep.verdict == "pass"


def test_ensemble_check_kinds():
    haar = run("ensemble-check", seed=0, kind="haar", samples=50)
    assert haar.result("||E(GG*)^2||")["mean"] == pytest.approx(1.0, abs=1e-12)
    assert run("ensemble-check", seed=0, kind="gaussian_frame", K=3, samples=5000).verdict == "pass"
    assert run("ensemble-check", seed=0, kind="haar", damping_p=8, samples=2000).verdict == "pass"


def test_anticoncentration_tables_are_csv():
    rep = run("anticoncentration", seed=0, **SMALL["anticoncentration"])
    assert rep.tables
    for text in rep.tables.values():
        assert text.startswith("t,boolean,mc,mc_stderr\n")
    assert "tables" not in rep.dumps()


def test_ncgi_opt_instance_from_config():
    inst = {"factors": [[[1, 0], [0, 1]]]}
    rep = run("ncgi-opt", seed=0, instance=inst, restarts=2, brute_force=False)
    assert rep.result("instance 0 free value")["value"] == pytest.approx(4.0)
