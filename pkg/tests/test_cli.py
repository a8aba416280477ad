import json
import subprocess
import sys

import pytest

from ncmaj.cli import build_parser, load_config, main
from ncmaj.errors import InvalidInputError


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "counterexample-wigner" in out and "kd-estimate" in out


def test_wigner_m2_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["run", "counterexample-wigner", "--m", "2", "--n", "50", "--samples", "20",
                 "--seed", "1", "--out", str(out)])
    assert code == 0
    assert "seed: 1" in capsys.readouterr().out
    rep = json.loads(out.read_text())
    boolean = next(r for r in rep["results"] if r["label"] == "boolean fourth moment")
    assert abs(boolean["value"] - 2.0) <= 1e-12
    assert rep["config"]["m"] == 2 and rep["seed"] == 1


def test_ensemble_check_haar(tmp_path):
    out = tmp_path / "r.json"
    assert main(["run", "ensemble-check", "--kind", "haar", "--K", "2", "--samples", "100",
                 "--seed", "0", "--out", str(out), "--quiet"]) == 0
    rep = json.loads(out.read_text())
    assert abs(rep["results"][0]["mean"] - 1.0) <= 1e-12


def test_rerun_from_report_is_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["run", "kd-estimate", "--samples", "5000", "--seed", "9", "--out", str(a), "--quiet"])
    main(["run", "kd-estimate", "--config", str(a), "--out", str(b), "--quiet"])
    ja, jb = json.loads(a.read_text()), json.loads(b.read_text())
    ja.pop("timings"), jb.pop("timings")
    assert ja == jb


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"d": 2, "samples": 100, "seed": 4}))
    out = tmp_path / "r.json"
    main(["run", "kd-estimate", "--config", str(cfg), "--samples", "200", "--out", str(out), "--quiet"])
    rep = json.loads(out.read_text())
    assert rep["config"]["d"] == 2 and rep["config"]["samples"] == 200 and rep["seed"] == 4


def test_env_seed(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("NCMAJ_SEED", "77")
    main(["run", "kd-estimate", "--samples", "100", "--quiet"])
    assert "seed: 77" in capsys.readouterr().out


def test_csv_outputs(tmp_path):
    grid = tmp_path / "grid.csv"
    main(["run", "anticoncentration", "--m", "4", "--p", "8", "--samples", "100", "--points", "3",
          "--seed", "0", "--csv", str(grid), "--quiet"])
    assert "t,boolean,mc,mc_stderr" in grid.read_text()
    flat = tmp_path / "flat.csv"
    main(["run", "kd-estimate", "--samples", "100", "--seed", "0", "--csv", str(flat), "--quiet"])
    assert flat.read_text().splitlines()[0] == "label,value,stderr,provenance"


def test_failing_verdict_exit_code(capsys):
    # the dictator half of the chop experiment does not decrease with p
    code = main(["run", "chop", "--ps", "8,16", "--m", "4", "--samples", "200", "--seed", "1"])
    assert code == 1
    assert "verdict: fail" in capsys.readouterr().out


def test_usage_errors(capsys, tmp_path):
    assert main(["run", "counterexample-wigner", "--n", "10", "--seed", "0"]) == 2
    assert "n >= 50" in capsys.readouterr().err
    assert main(["run", "kd-estimate", "--config", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "no-such-experiment"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "kd-estimate", "--d", "abc"])
    assert exc.value.code == 2


def test_parser_type_conversion():
    args = build_parser().parse_args(["run", "majorize", "--ps", "8,16", "--Ks", "2,3"])
    assert args.param_ps == [8, 16] and args.param_Ks == [2, 3]
    args = build_parser().parse_args(["run", "anticoncentration", "--compare", "false"])
    assert args.param_compare is False


def test_load_config_validation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(InvalidInputError):
        load_config(bad)
    assert load_config(None) == ({}, None)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ncmaj", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and "majorize" in res.stdout
