import json
import math
import subprocess
import sys

import pytest

from hilbsam.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    (tmp_path / "tc.txt").write_text("x0*x2 - x1^2\nx1*x3 - x2^2\nx0*x3 - x1*x2\n")
    (tmp_path / "mono.txt").write_text("x0*x1\n")
    (tmp_path / "bad.txt").write_text("x0^2 - x1\n")
    (tmp_path / "fs.json").write_text(json.dumps({"type": "fubini-study", "dim": 1}))
    (tmp_path / "badspec.json").write_text("{\"type\": \"torus\"}")
    (tmp_path / "series.txt").write_text(" ".join(str(3 * n) for n in range(1, 101)))
    return tmp_path


def test_transport(capsys):
    code, out, _ = run(capsys, "transport", "--n", "1", "--m", "1", "--r", "1")
    assert code == 0
    assert out.splitlines() == ["[1/3, 1/6]", "[1/6, 1/3]", "constraints: OK"]


def test_hilbert_zero(capsys):
    code, out, _ = run(capsys, "hilbert", "--ideal", "zero", "--vars", "3", "--nmax", "8", "--poly")
    assert code == 0
    rows = out.splitlines()
    assert rows[1:10] == [f"{n},{math.comb(n + 2, 2)}" for n in range(9)]
    assert rows[-1] == "# Hilbert polynomial: 1/2*n^2 + 3/2*n + 1 for n >= 0"


def test_hilbert_nonmonomial(capsys, files):
    code, out, _ = run(capsys, "hilbert", "--ideal", str(files / "tc.txt"), "--nmax", "5", "--poly")
    assert code == 0 and "5,16" in out.splitlines() and out.rstrip().endswith("3*n + 1 for n >= 0")


def test_deform(capsys, files):
    code, out, _ = run(capsys, "deform", "--ideal", str(files / "tc.txt"), "--iterate")
    assert code == 0 and out.rstrip().endswith("OK")
    code, out, _ = run(capsys, "deform", "--ideal", str(files / "tc.txt"), "--var", "2")
    assert code == 0 and "renamed y" in out


def test_chi(capsys, files):
    code, out, _ = run(capsys, "chi", "--spec", str(files / "fs.json"), "--n", "3")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "n,chi,error_bound" and len(rows) == 5
    assert float(rows[3].split(",")[1]) == pytest.approx(math.log(2))


def test_invariant(capsys, files, tmp_path):
    csv_path = tmp_path / "table.csv"
    code, out, _ = run(capsys, "invariant", "--spec", str(files / "fs.json"), "--r", "2", "--jmax", "8",
                       "--nmax", "400", "--csv", str(csv_path))
    data = json.loads(out)
    assert code == 0 and data["oracle_value"] == 0.5
    assert abs(data["c_lower"] - 0.5) <= 0.02 and data["certified"]
    assert csv_path.read_text().startswith("j,n,chi,normalized,fekete_lower,error_bound")


def test_fekete(capsys, files):
    code, out, _ = run(capsys, "fekete", "--series", str(files / "series.txt"), "--N", "100")
    data = json.loads(out)
    assert code == 0 and data["certified_lower"] == "3" and not data["diverges"]


def test_deterministic_output(capsys, files):
    a = run(capsys, "invariant", "--spec", str(files / "fs.json"), "--nmax", "60", "--jmax", "3")
    b = run(capsys, "invariant", "--spec", str(files / "fs.json"), "--nmax", "60", "--jmax", "3")
    assert a == b


@pytest.mark.parametrize("argv", [
    ["transport", "--n", "1", "--m", "1", "--r", "0"],
    ["hilbert", "--ideal", "missing.txt"],
    ["hilbert", "--ideal", "zero"],
    ["chi", "--spec", "missing.json", "--n", "2"],
    ["chi", "--spec", "fs.json", "--n", "2", "--precision", "16"],
    ["fekete", "--series", "series.txt", "--N", "500"],
    ["invariant", "--spec", "fs.json", "--r", "1"],
    ["deform", "--ideal", "tc.txt", "--var", "9"],
    ["hilbert", "--ideal", "bad.txt"],
    ["chi", "--spec", "badspec.json", "--n", "2"],
])
def test_usage_errors(capsys, files, monkeypatch, argv):
    monkeypatch.chdir(files)
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse reports its own errors this way
        code = exc.code
    assert code == 2


def test_budget_exit_code(capsys, files):
    code, _, err = run(capsys, "deform", "--ideal", str(files / "tc.txt"), "--iterate", "--max-basis", "1")
    assert code == 3 and "budget" in err


def test_entry_point_module(files):
    out = subprocess.run([sys.executable, "-m", "hilbsam.cli", "transport", "--n", "0", "--m", "2", "--r", "1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[0] == "[1/3, 1/3, 1/3]"


def test_verify_all_subset(capsys, monkeypatch):
    import hilbsam.verify as verify

    monkeypatch.setattr(verify, "ACCEPTANCE", verify.ACCEPTANCE[2:3])
    monkeypatch.setattr(verify, "EXTRA", verify.EXTRA[2:4])
    code, out, _ = run(capsys, "verify-all")
    lines = out.splitlines()
    assert code == 0 and lines[-1] == "3/3 checks passed"
    assert [ln.split()[1] for ln in lines[:3]] == ["[3]", "[P3]", "[P4]"]
    assert run(capsys, "verify-all") == (code, out, "")


def test_verify_all_failure_exit(capsys, monkeypatch):
    import hilbsam.verify as verify

    monkeypatch.setattr(verify, "ACCEPTANCE", [("X", "always fails", lambda seed: (False, "planted"))])
    monkeypatch.setattr(verify, "EXTRA", [])
    code, out, _ = run(capsys, "verify-all")
    assert code == 1 and out.startswith("FAIL [X] always fails: planted")
