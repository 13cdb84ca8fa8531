import json
import subprocess
import sys

import pytest

from opalg import cli
from opalg import serialize as ser
from opalg.algebra import Algebra
from opalg.maps import transpose_map


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


@pytest.fixture
def transpose_file(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps(ser.linmap_to_json(transpose_map(Algebra.of(2)))))
    return str(path)


@pytest.fixture
def isometry_file(tmp_path, capsys):
    path = tmp_path / "iso.json"
    assert cli.main(["generate", "isometry", "--seed", "1", "-o", str(path)]) == 0
    capsys.readouterr()
    return str(path)


def test_check_jordan(transpose_file, capsys):
    code, out = run(["check-jordan", transpose_file], capsys)
    assert code == 0 and json.loads(out.out)["jordan"] is True


def test_check_jordan_flags_random_map(tmp_path, capsys):
    path = tmp_path / "m.json"
    assert cli.main(["generate", "map", "--seed", "3", "-o", str(path)]) == 0
    code, out = run(["check-jordan", str(path)], capsys)
    assert code == 1 and json.loads(out.out)["jordan"] is False


def test_stormer_to_file(transpose_file, tmp_path, capsys):
    out = tmp_path / "d.json"
    code, _ = run(["stormer", transpose_file, "-o", str(out)], capsys)
    data = json.loads(out.read_text())
    assert code == 0 and [a["kind"] for a in data["assignments"]] == ["anti"]


def test_cbnorm_certified_at_inf(transpose_file, capsys):
    code, out = run(["cbnorm", transpose_file, "--p", "inf", "--k-max", "2", "--restarts", "2", "--seed", "0"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["certified"] and data["upper"] == 2 and abs(data["lower"] - 2) < 1e-9


def test_cbnorm_fraction_exponent(transpose_file, capsys):
    code, out = run(["cbnorm", transpose_file, "--p", "4/3", "--k-max", "2", "--restarts", "1"], capsys)
    data = json.loads(out.out)
    assert code == 0 and not data["certified"] and data["upper"] is None
    assert abs(data["lower"] - 2 ** 0.5) < 0.02 * 2**0.5


def test_yeadon_roundtrip(isometry_file, tmp_path, capsys):
    inst = json.loads(open(isometry_file).read())
    p = str(inst["p"])
    code, out = run(["yeadon", "factorize", isometry_file, "--p", p], capsys)
    assert code == 0 and set(json.loads(out.out)) == {"w", "b", "J", "p"}
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(inst["spec"]))
    code, out = run(["yeadon", "build", str(spec), "--p", p], capsys)
    built = json.loads(out.out)
    assert code == 0
    gap = ser.linmap_from_json(built["map"]).matrix - ser.linmap_from_json(inst["map"]).matrix
    assert abs(gap).max() < 1e-12


def test_yeadon_factorize_failure_exit_code(transpose_file, capsys):
    # the transpose on M_2 with unit weights is an L^1 isometry; halve it
    t = ser.linmap_from_json(json.loads(open(transpose_file).read())) * 0.5
    with open(transpose_file, "w") as fh:
        json.dump(ser.linmap_to_json(t), fh)
    code, out = run(["yeadon", "factorize", transpose_file, "--p", "1"], capsys)
    assert code == 1 and "error" in json.loads(out.out)


def test_verify_and_conjecture(capsys):
    code, out = run(["verify", "local-lifting", "--seed", "0", "--trials", "3"], capsys)
    assert code == 0 and json.loads(out.out)["passed"]
    code, out = run(["conjecture", "--p", "1", "--trials", "2", "--k-max", "2"], capsys)
    assert code == 0 and json.loads(out.out)["params"]["k_max"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["stormer", "/nonexistent.json"],
        ["cbnorm", "x.json", "--p", "0.5"],
        ["conjecture", "--p", "2", "--trials", "1"],
        ["verify", "thm-main", "--p", "3"],
        ["bogus"],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2


def test_bad_json_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{")
    assert cli.main(["check-jordan", str(path)]) == 2
    path.write_text(json.dumps({"domain": {"blocks": [{"dim": 2}]}}))
    assert cli.main(["check-jordan", str(path)]) == 2


def test_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("OPALG_SEED", "11")
    code, out = run(["verify", "thm-main", "--trials", "1"], capsys)
    assert code == 0 and json.loads(out.out)["seed"] == 11
    monkeypatch.setenv("OPALG_SEED", "eleven")
    assert cli.main(["verify", "thm-main", "--trials", "1"]) == 2


def test_console_entry_point(transpose_file):
    proc = subprocess.run(
        [sys.executable, "-m", "opalg.cli", "check-jordan", transpose_file], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["jordan"]
