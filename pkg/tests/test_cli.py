import json
import shutil
import subprocess

import pytest

from schottky.cli import main

PAIRS = {
    "version": 1,
    "pairs": [
        {"c": {"cx": -2, "cy": 0, "r": 1}, "c_prime": {"cx": 2, "cy": 0, "r": 1}},
        {"c": {"cx": 0, "cy": -2, "r": 0.5}, "c_prime": {"cx": 0, "cy": 2, "r": 0.5}},
    ],
}
OVERLAP = {
    "version": 1,
    "pairs": [
        {"c": {"cx": -2, "cy": 0, "r": 1}, "c_prime": {"cx": 2, "cy": 0, "r": 1}},
        {
            "c": {"cx": -1.5, "cy": 0, "r": 1},
            "c_prime": {"cx": 0, "cy": 3, "r": 0.5},
            "map": [[1, 0], [0, 1]],
        },
    ],
}


@pytest.fixture
def cfg(tmp_path):
    def write(data, name="cfg.json"):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(cfg, capsys):
    code, out, _ = run(capsys, "validate", "--config", cfg(PAIRS))
    rep = json.loads(out)
    assert code == 0 and rep["result"]["admissible"] is True
    assert rep["command"] == "validate" and rep["options"]["depth"] == 3


def test_validate_failure_exit_2(cfg, capsys):
    code, out, err = run(capsys, "validate", "--config", cfg(OVERLAP))
    assert code == 2
    assert json.loads(out)["result"]["admissible"] is False
    assert "error: ValidationFailed" in err


def test_orbit_on_inadmissible_exit_2(cfg, capsys):
    code, _, err = run(capsys, "orbit", "--config", cfg(OVERLAP))
    assert code == 2 and "NotAdmissible" in err


def test_budget_exit_3(cfg, capsys):
    code, _, err = run(capsys, "orbit", "--config", cfg(PAIRS), "--depth", "8", "--budget", "100")
    assert code == 3 and "BudgetExceeded" in err


def test_schema_exit_4(cfg, capsys):
    bad = json.loads(json.dumps(PAIRS))
    del bad["pairs"][0]["c"]["r"]
    code, _, err = run(capsys, "validate", "--config", cfg(bad))
    assert code == 4 and "SchemaError" in err and "pairs/0/c/r" in err


def test_parse_exit_4(cfg, capsys):
    code, _, err = run(capsys, "validate", "--config", cfg("{\n,"))
    assert code == 4 and "ParseError" in err and "line 2" in err


def test_missing_config_exit_4(tmp_path, capsys):
    code, _, err = run(capsys, "validate", "--config", str(tmp_path / "none.json"))
    assert code == 4 and "IoError" in err


def test_orbit_json_and_csv(cfg, capsys):
    path = cfg(PAIRS)
    code, out, _ = run(capsys, "orbit", "--config", path, "--depth", "2")
    res = json.loads(out)["result"]
    assert code == 0 and len(res["translated"]) == 16 and len(res["chains"]) == 12
    assert all(c["nested"] for c in res["chains"])
    code, out, _ = run(capsys, "orbit", "--config", path, "--depth", "4", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "depth,count,max_diam,mean_diam" and len(lines) == 5


def test_census_csv(cfg, capsys):
    code, out, _ = run(capsys, "census", "--config", cfg(PAIRS), "--depth", "6", "--threshold", "0.05", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "depth,count,max_diam,mean_diam"


def test_limitset_formats(cfg, capsys, tmp_path):
    path = cfg(PAIRS)
    out_file = tmp_path / "ls.svg"
    code, _, _ = run(capsys, "limitset", "--config", path, "--depth", "3", "--format", "svg", "--out", str(out_file))
    assert code == 0 and out_file.read_text().startswith("<?xml")
    code, out, _ = run(capsys, "limitset", "--config", path, "--depth", "3", "--format", "csv")
    assert len(out.splitlines()) == 1 + 4 * 3 * 3


def test_render_counts(cfg, capsys):
    path = cfg(PAIRS)
    _, out, _ = run(capsys, "render", "--config", path, "--depth", "0")
    assert out.count("<circle") == 4
    _, out, _ = run(capsys, "render", "--config", path, "--depth", "2")
    assert out.count("<circle") == 4 + 16


def test_summary(cfg, capsys):
    code, out, _ = run(capsys, "summary", "--config", cfg(PAIRS))
    assert code == 0 and json.loads(out)["result"]["genus"] == 2


def test_construct_commands(capsys):
    code, out, _ = run(capsys, "construct", "fatset", "--n", "4", "--delta", "1")
    assert code == 0 and json.loads(out)["result"]["validation"]["admissible"]
    code, out, _ = run(capsys, "construct", "ends", "--N", "3")
    assert code == 0 and json.loads(out)["result"]["star"]["passed"]
    code, out, _ = run(capsys, "construct", "counterexample")
    assert code == 0 and json.loads(out)["result"]["chain_nested"]
    code, _, err = run(capsys, "construct", "ends", "--margin", "1")
    assert code == 2 and "InfeasibleMargin" in err


def test_qc_commands(capsys):
    code, out, _ = run(capsys, "qc", "mu")
    assert code == 0 and abs(json.loads(out)["result"]["mu"] - 1.5707963267948966) < 1e-14
    code, out, _ = run(capsys, "qc", "bound", "--trials", "50")
    assert code == 0 and json.loads(out)["result"]["violations"] == 0
    code, out, _ = run(capsys, "qc", "collar", "--grid", "16")
    assert code == 0 and json.loads(out)["result"]["max_abs_mu"] < 1
    code, _, err = run(capsys, "qc", "mu", "--r", "1.5")
    assert code == 2 and "OutOfDomain" in err


def test_console_script(cfg):
    exe = shutil.which("schottky")
    if exe is None:
        pytest.skip("console script not installed")
    p = subprocess.run([exe, "validate", "--config", cfg(PAIRS)], capture_output=True, text=True)
    assert p.returncode == 0 and '"admissible": true' in p.stdout


def test_output_independent_of_backend(cfg):
    import os
    import sys

    path = cfg(PAIRS)
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, SCHOTTKY_PURE_PYTHON=flag)
        p = subprocess.run(
            [sys.executable, "-m", "schottky.cli", "orbit", "--config", path, "--depth", "4"],
            env=env, capture_output=True, check=True,
        )
        outs.append(p.stdout)
    assert outs[0] == outs[1]
