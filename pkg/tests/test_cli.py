import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from antipodal.cli import CommandConfig, main, parse_point, rounded, run
from antipodal.mesh import cube

DATA = Path(__file__).resolve().parent.parent / "data"


def call(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = call(["validate", str(DATA / "cube.off")], capsys)
    assert code == 0
    assert "V 8 E 12 F 6 euler 2" in out
    assert f"deficit_sum {4 * math.pi:.12g}" in out


def test_validate_json(capsys, tmp_path):
    code, out, _ = call(["validate", "tetrahedron", "--format", "json", "--out", str(tmp_path / "v.json")], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["V"] == 4 and doc["deficit_sum"] == pytest.approx(4 * math.pi, abs=1e-9)
    assert json.loads((tmp_path / "v.json").read_text()) == doc


def test_verify_symbolic(capsys):
    code, out, _ = call(["verify-symbolic"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "lemma2: residuals 0; counterexample: residuals 0"


def test_distance(capsys):
    code, out, _ = call(["distance", "cube", "c:0", "c:1"], capsys)
    assert code == 0
    assert out.splitlines()[:2] == ["distance 2", "geodesics 4"]


def test_antipode_json(capsys):
    code, out, _ = call(["antipode", "cube", "v:0", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["radius"] == pytest.approx(math.sqrt(5), abs=1e-9)


def test_survey(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = call(["survey", "cube", "--n", "200", "--seed", "42", "--out", str(path)], capsys)
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["verdict"] == "NotSteinhaus"
    assert doc["n"] == 200 and doc["seed"] == 42
    assert (tmp_path / "report.png").stat().st_size > 0
    assert "verdict NotSteinhaus" in out


def test_zonemap_outputs(capsys, tmp_path):
    code, out, _ = call(["zonemap", "tetrahedron", "--face", "1", "--resolution", "12", "--out", str(tmp_path)], capsys)
    assert code == 0
    svg = (tmp_path / "tetrahedron_face1.svg").read_text()
    assert 'viewBox="0 0 1000 1000"' in svg
    assert (tmp_path / "tetrahedron_face1.png").exists()
    code, _, _ = call(
        ["zonemap", "tetrahedron", "--face", "1", "--resolution", "12", "--out", str(tmp_path), "--format", "json"],
        capsys,
    )
    doc = json.loads((tmp_path / "tetrahedron_face1.json").read_text())
    assert doc["resolution"] == 12 and doc["samples"]


def test_oracle_check(capsys):
    code, out, _ = call(["oracle-check", "cube", "--n", "10"], capsys)
    assert code == 0 and out.strip().endswith("mismatches 0")


def test_domain_error(capsys, tmp_path):
    bad = tmp_path / "dent.off"
    bad.write_text(
        "OFF\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 0.2\n"
        "3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n"
    )
    code, _, err = call(["validate", str(bad)], capsys)
    assert code == 1 and err.startswith("error [mesh.NotConvex]")


def test_invalid_point_is_domain_error(capsys):
    code, _, err = call(["antipode", "cube", "9:0.25,0.25,0.25,0.25"], capsys)
    assert code == 1 and "mesh.InvalidPoint" in err


@pytest.mark.parametrize(
    "args",
    [
        ["antipode", "cube", "nonsense"],
        ["antipode", "cube", "v:99"],
        ["zonemap", "cube", "--resolution", "4", "--out", "x"],
        ["survey", "cube", "--tol-single", "0"],
        ["validate", "no-such-file.off"],
        ["zonemap", "cube", "--face", "0"],
    ],
)
def test_usage_errors(args, capsys):
    code, _, err = call(args, capsys)
    assert code == 2 and err.startswith("usage error")


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_parse_point_forms():
    P = cube()
    assert P.vertex_of(parse_point(P, "v:7")) == 7
    assert parse_point(P, "c:2") == P.face_center(2)
    assert parse_point(P, "0:0.25,0.25,0.25,0.25") == P.face_center(0)


def test_rounding():
    assert rounded({"a": [1 / 3, 2.0]}) == {"a": [0.333333333333, 2.0]}


def test_run_config_check():
    assert run(CommandConfig("validate", mesh="cube", resolution=2)) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "antipodal", "validate", "cube"], capture_output=True, text=True)
    assert res.returncode == 0 and "euler 2" in res.stdout
