import json
import subprocess
import sys

import pytest

from homoclinic.cli import EXIT_INPUT, EXIT_OK, EXIT_SOLVER, run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants(capsys):
    code, out, _ = call(capsys, "constants", "--no-meta")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["beta_star_reported"] == 0.7427
    assert "meta" not in d


def test_meta_included_by_default(capsys):
    code, out, _ = call(capsys, "decay", "--beta", "0.5")
    assert code == EXIT_OK
    assert "version" in json.loads(out)["meta"]


def test_ustar_and_astar(capsys):
    code, out, _ = call(capsys, "ustar", "--beta", "0.5", "--no-meta")
    assert json.loads(out)["u_star"] == pytest.approx(-47.7516632749489)
    code, out, _ = call(capsys, "astar", "--beta", "0.7427", "--no-meta")
    assert json.loads(out)["a_star"] == pytest.approx(4.2331, abs=1e-4)


def test_beta_star(capsys):
    code, out, _ = call(capsys, "beta-star", "--k0", "1.0", "--no-meta")
    assert json.loads(out)["beta_star_computed"] == pytest.approx(0.91802, abs=1e-5)


@pytest.mark.parametrize("which", ["navier", "beam", "clamped", "quadform"])
def test_inequality_json(capsys, which):
    code, out, _ = call(capsys, "inequality", which, "--no-meta")
    assert code == EXIT_OK
    assert json.loads(out)


def test_inequality_csv(capsys):
    code, out, _ = call(capsys, "inequality", "l2")
    assert out.splitlines()[0] == "k,value"
    code, out, _ = call(capsys, "inequality", "l1")
    assert out.splitlines()[0] == "k,a,M_a,sign"


@pytest.mark.parametrize(
    "argv",
    [
        ["solve"],
        ["solve", "--beta", "-1"],
        ["solve", "--beta", "0.5", "--grid-points", "2000"],
        ["solve", "--beta", "0.5", "--domain-length", "0"],
        ["solve", "--beta", "0.5", "--tol", "0"],
        ["ustar", "--beta", "5"],
        ["frobnicate"],
        ["solve", "--potential", "quartic", "--beta", "0.5"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == EXIT_INPUT
    assert err


def test_nonconvergence_exit_code(capsys):
    argv = ["solve", "--beta", "0.5", "--domain-length", "2", "--grid-points", "101"]
    code, _, err = call(capsys, *argv)
    assert code == EXIT_SOLVER
    assert "solver failed" in err


def test_solve_and_certify_roundtrip(tmp_path, capsys):
    out = tmp_path / "run.json"
    code, _, _ = call(capsys, "solve", "--beta", "0.6", "--output", str(out), "--no-meta")
    assert code == EXIT_OK
    d = json.loads(out.read_text())
    profile = tmp_path / "run.profile.csv"
    assert profile.exists()
    code, text, _ = call(capsys, "certify", str(profile), "--beta", "0.6", "--no-meta")
    assert code == EXIT_OK
    c = json.loads(text)
    assert c["checks"]["morse_index"] == d["morse_index"] == 1
    assert c["residual_sup"] < 1e-6


def test_solve_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert call(capsys, "solve", "--beta", "0.7", "--output", str(p), "--no-meta")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_csv(capsys):
    code, out, _ = call(capsys, "sweep", "--betas", "0.6,0.7")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "beta,c_beta,morse_index,tau_fit,tau_theory,min_u"
    assert len(lines) == 3


def test_certify_missing_file(capsys, tmp_path):
    code, _, _ = call(capsys, "certify", str(tmp_path / "nope.csv"), "--beta", "0.5")
    assert code == EXIT_INPUT


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "homoclinic", "decay", "--beta", "0.5", "--no-meta"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["tau"] > 0
    proc = subprocess.run([sys.executable, "-m", "homoclinic", "solve", "--beta", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 3
