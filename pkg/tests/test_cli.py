import json
import subprocess
import sys

import numpy as np
import pytest

from ktlab.cli import EXIT_DISAGREE, EXIT_INPUT, EXIT_OK, main


def write_cfg(tmp_path, **cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ktlab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("ktlab ")


def test_analyze_identity(tmp_path, capsys):
    cfg = write_cfg(tmp_path, space="H2", h="1", psi="z",
                    grids={"radii": [0, 0.5, 0.9, 0.99], "n_angles": 8})
    code, out, _ = run(["analyze", "--config", cfg], capsys)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["status"] == "PASS"
    assert {r["verdict"] for r in rep["results"] if not r["evidence_only"]} == {"bounded-below"}


@pytest.mark.parametrize("argv", [
    ["analyze"],
    ["nope"],
    ["scenario", "run", "no-such-scenario"],
    ["scenario", "run"],
    ["measure", "import"],
])
def test_bad_invocations_exit_one(argv, capsys):
    with pytest.raises(SystemExit) as e:
        code = main(argv)
        raise SystemExit(code)
    assert e.value.code == EXIT_INPUT


@pytest.mark.parametrize("cfg", [
    {"space": "H2", "h": "1", "psi": "2*z"},
    {"space": "H2", "h": "1 +", "psi": "z"},
    {"space": "Q7", "h": "1", "psi": "z"},
    {"space": "H2", "h": "1"},
])
def test_invalid_configs_exit_one(tmp_path, capsys, cfg):
    code, out, err = run(["analyze", "--config", write_cfg(tmp_path, **cfg)], capsys)
    assert code == EXIT_INPUT and out == "" and err.startswith("ktlab: error")


def test_scan_csv(tmp_path, capsys):
    cfg = write_cfg(tmp_path, space="H2", h="1", psi="z/2", grids={"radii": [0, 0.9, 0.99], "n_angles": 4})
    path = tmp_path / "scan.csv"
    code, out, _ = run(["scan-kernels", "--config", cfg, "--csv", str(path)], capsys)
    assert code == EXIT_OK and json.loads(out)["verdict"] == "not-bounded-below"
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert data.dtype.names == ("lambda_re", "lambda_im", "value") and len(data) == 9
    r2 = data["lambda_re"] ** 2 + data["lambda_im"] ** 2
    np.testing.assert_allclose(data["value"], np.sqrt((1 - r2) / (1 - r2 / 4)), rtol=1e-8)


def test_density_csv_and_seed(tmp_path, capsys, monkeypatch):
    cfg = write_cfg(tmp_path, space="H2", h="1", psi="z")
    path = tmp_path / "d.csv"
    argv = ["density", "--config", cfg, "--bins", "64", "--samples", "4096", "--csv", str(path)]
    monkeypatch.setenv("KTL_SEED", "5")
    code, out, _ = run(argv, capsys)
    res = json.loads(out)
    assert code == EXIT_OK and res["grid"]["seed"] == 5 and res["verdict"] == "bounded-below"
    assert path.read_text().splitlines()[0] == "theta,density,half_width"
    # an explicit seed beats the environment
    _, out2, _ = run(["--seed", "9"] + argv, capsys)
    assert json.loads(out2)["grid"]["seed"] == 9


def test_toeplitz_symbol(capsys):
    code, out, _ = run(["toeplitz", "--symbol", "2+(z+1/z)/2", "--N", "1024", "--sizes", "16", "32"], capsys)
    res = json.loads(out)
    assert code == EXIT_OK and res["verdict"] == "bounded-below"
    assert res["constant_estimate"] == pytest.approx(1.0, abs=0.05)


def test_witness(tmp_path, capsys):
    cfg = write_cfg(tmp_path, space="H2", h="1", psi="(1+z)/2")
    code, out, _ = run(["witness", "--config", cfg, "--n-max", "32"], capsys)
    assert code == EXIT_OK and json.loads(out)["success"]


def test_measure_export_import(tmp_path, capsys):
    cfg = write_cfg(tmp_path, space="H2", h="2+z", psi="z")
    for fmt in ("csv", "bin"):
        path = str(tmp_path / f"mu.{fmt}")
        code, out, _ = run(["measure", "export", path, "--config", cfg, "--format", fmt, "--samples", "4096"], capsys)
        assert code == EXIT_OK and json.loads(out)["atoms"] == 4096
        code, out, _ = run(["measure", "import", path, "--format", fmt, "--bins", "64"], capsys)
        back = json.loads(out)
        assert code == EXIT_OK and back["total_mass"] == pytest.approx(5.0, rel=1e-12)
        assert back["ess_inf_density"]["verdict"] == "bounded-below"


def test_scenario_list_and_single_run(capsys, tmp_path):
    code, out, _ = run(["scenario", "list"], capsys)
    names = [line.split()[0] for line in out.splitlines()]
    assert code == EXIT_OK and "identity" in names and len(names) >= 20
    outp = tmp_path / "r.json"
    code, _, err = run(["scenario", "run", "rotation", "--out", str(outp)], capsys)
    assert code == EXIT_OK and "rotation" in err
    assert json.loads(outp.read_text())["status"] == "PASS"


def test_disagreement_exits_two(tmp_path, monkeypatch, capsys):
    # a scenario whose declared oracle contradicts every criterion
    import ktlab.cli as cli

    cfg = {"name": "liar", "oracle": "not-bounded-below", "space": "H2", "h": "1", "psi": "z",
           "grids": {"radii": [0, 0.5, 0.9, 0.99], "n_angles": 8}}
    monkeypatch.setattr(cli, "list_scenarios", lambda: ["liar"])
    monkeypatch.setattr(cli, "load_scenario", lambda name: dict(cfg))
    code, out, _ = run(["scenario", "run", "all"], capsys)
    assert code == EXIT_DISAGREE and json.loads(out)["status"] == "FAIL"


def test_shipped_scenarios_all_pass(scenario_run_all):
    code, rep = scenario_run_all
    assert code == EXIT_OK and not rep["failed"]
