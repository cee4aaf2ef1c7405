import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pntomo.cli import fmt, main, parse_alpha, parse_int_set


def write(tmp_path, name, sigma, mean_q=None, mean_p=None):
    modes = len(sigma) // 2
    spec = {
        "modes": modes,
        "mean_q": mean_q or [0.0] * modes,
        "mean_p": mean_p or [0.0] * modes,
        "sigma": sigma,
    }
    path = tmp_path / name
    path.write_text(json.dumps(spec))
    return str(path)


@pytest.fixture
def vac(tmp_path):
    return write(tmp_path, "vac.json", [[0.5, 0], [0, 0.5]])


@pytest.fixture
def subvac(tmp_path):
    return write(tmp_path, "sub.json", [[0.4, 0], [0, 0.4]])


@pytest.fixture
def thermal(tmp_path):
    return write(tmp_path, "th.json", [[1.5, 0], [0, 1.5]])


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parsers():
    assert parse_int_set("0-3") == [0, 1, 2, 3]
    assert parse_int_set("0..2,5") == [0, 1, 2, 5]
    assert parse_alpha("0.5+0.3i;-1", 2) == (0.5 + 0.3j, -1)
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333333333"


def test_validate_exit_codes(capsys, vac, subvac, tmp_path):
    code, out, _ = run(capsys, "validate", vac)
    assert code == 0 and json.loads(out)["verdict"] == "Valid"
    code, out, _ = run(capsys, "validate", subvac)
    assert code == 2 and json.loads(out)["per_mode_det"] == [0.16]
    bad = write(tmp_path, "bad.json", [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 1]])
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and "sigma must be 2N×2N" in err
    code, _, err = run(capsys, "validate", tmp_path / "missing.json")
    assert code == 1


def test_tomogram_csv(capsys, vac):
    code, out, _ = run(capsys, "tomogram", vac, "--n", "0-3", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "n,re_alpha,im_alpha,omega"
    assert [r["omega"] for r in rows(out)] == ["1", "0", "0", "0"]
    code, out, _ = run(capsys, "tomogram", vac, "--n", "1", "--alpha", "1", "--format", "csv")
    assert float(rows(out)[0]["omega"]) == pytest.approx(math.exp(-1), rel=1e-11)


def test_tomogram_oracle_column(capsys, thermal):
    code, out, _ = run(
        capsys, "tomogram", thermal, "--n", "0-4", "--alpha", "0.5+0.3j",
        "--oracle", "quadrature", "--format", "csv",
    )
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["n", "re_alpha", "im_alpha", "omega", "omega_oracle", "abs_diff"]
    assert max(float(r["abs_diff"]) for r in table) <= 1e-6


def test_two_mode_columns(capsys, tmp_path):
    path = write(tmp_path, "two.json", np.diag([0.5, 1.0, 0.5, 1.0]).tolist())
    code, out, _ = run(capsys, "tomogram", path, "--n", "0-1;0-2", "--alpha", "0.1;0.2j", "--format", "csv")
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert header == ["n1", "n2", "re_alpha1", "re_alpha2", "im_alpha1", "im_alpha2", "omega"]
    assert len(rows(out)) == 6


def test_degree_cap_exit(capsys, vac):
    code, _, err = run(capsys, "tomogram", vac, "--n", "40")
    assert code == 2 and "(40,)" in err


def test_bad_alpha_is_input_error(capsys, vac):
    code, _, err = run(capsys, "tomogram", vac, "--alpha", "abc")
    assert code == 1 and "abc" in err


def test_p0(capsys, thermal):
    code, out, _ = run(capsys, "p0", thermal, "--alpha", "0", "--format", "csv")
    assert code == 0 and float(rows(out)[0]["p0"]) == pytest.approx(0.5)


def test_positivity_exit_codes(capsys, vac, subvac):
    code, out, _ = run(capsys, "positivity", vac, "--n-max", "6", "--resolution", "5")
    assert code == 0 and json.loads(out)["verdict"] == "PassedAllScans"
    code, out, _ = run(capsys, "positivity", subvac, "--n-max", "6", "--resolution", "5")
    report = json.loads(out)
    assert code == 3
    first = report["negative_witnesses"][0]
    assert first["n"] == [1] and first["alpha"] == [[0.0, 0.0]]
    assert first["omega"] == pytest.approx(-0.1234567901, abs=1e-9)


def test_reconstruct_defaults_recorded(capsys, tmp_path, vac):
    out = tmp_path / "rho.json"
    code, _, _ = run(capsys, "reconstruct", vac, "-o", out)
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["density_matrix"][0][0][0] >= 0.99
    manifest = json.loads((tmp_path / "rho.json.manifest.json").read_text())
    assert manifest["parameters"]["config"]["cutoff"] == 12
    assert manifest["command"] == "reconstruct"


def test_reconstruct_coherent_reports_distance(capsys, tmp_path):
    path = write(tmp_path, "coh.json", [[0.5, 0], [0, 0.5]], mean_q=[np.sqrt(2) * 0.5])
    code, out, _ = run(capsys, "reconstruct", path)
    assert code == 0 and json.loads(out)["frobenius_to_reference"] <= 1e-2


def test_reconstruct_config_invalid(capsys, vac):
    code, _, err = run(capsys, "reconstruct", vac, "--s", "0.5")
    assert code == 2 and "outside" in err


def test_reconstruct_from_csv(capsys, tmp_path):
    path = write(tmp_path, "th.json", [[1.0, 0], [0, 1.0]])
    table = tmp_path / "t.csv"
    grid = "4,40,40"
    code, _, _ = run(capsys, "tomogram", path, "--n", "0-20", "--polar-grid", grid,
                     "--format", "csv", "-o", table)
    assert code == 0
    a_out, b_out = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "reconstruct", "--tomogram-csv", table, "-o", a_out)[0] == 0
    assert run(capsys, "reconstruct", path, "-o", b_out)[0] == 0
    a = np.array(json.loads(a_out.read_text())["density_matrix"])
    b = np.array(json.loads(b_out.read_text())["density_matrix"])
    # 12-digit CSV values, amplified by |t|^cutoff = 3^12 in the top corner
    assert np.max(np.abs(a - b)) <= 1e-6
    # a grid the CSV does not cover is rejected
    code, _, err = run(capsys, "reconstruct", "--tomogram-csv", table, "--radial", "10")
    assert code == 2 and "no value" in err


def test_oracle_compare(capsys, thermal):
    code, out, _ = run(capsys, "oracle-compare", thermal, "--n-max", "4", "--alpha", "-1")
    payload = json.loads(out)
    assert code == 0 and payload["agree"]
    assert payload["max_abs_diff"] <= 1e-6


def test_byte_identical_reruns(capsys, tmp_path, thermal):
    outs = []
    for k in range(2):
        target = tmp_path / f"run{k}.csv"
        run(capsys, "tomogram", thermal, "--n", "0-5", "--alpha-grid", "1:3",
            "--oracle", "fock", "--format", "csv", "-o", target)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    for k in range(2):
        run(capsys, "positivity", thermal, "--n-max", "5", "--resolution", "3", "-o", tmp_path / f"p{k}.json")
    assert (tmp_path / "p0.json").read_bytes() == (tmp_path / "p1.json").read_bytes()


def test_thread_env_does_not_change_output(capsys, monkeypatch, tmp_path, thermal):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("TOMO_THREADS", threads)
        target = tmp_path / f"o{threads}.json"
        run(capsys, "oracle-compare", thermal, "--n-max", "3", "--alpha", "0", "--alpha", "0.5", "-o", target)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    monkeypatch.setenv("TOMO_THREADS", "many")
    assert run(capsys, "oracle-compare", thermal)[0] == 1


def test_module_entry_point(vac):
    proc = subprocess.run(
        [sys.executable, "-m", "pntomo", "validate", vac], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "Valid"
