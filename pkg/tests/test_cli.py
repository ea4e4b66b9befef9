import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from eulerpoincare import cli
from eulerpoincare import liegroup as lg
from eulerpoincare.connections import DiscreteField, reduce
from eulerpoincare.mesh import Mesh

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def solved_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("solve") / "phi.json"
    assert cli.main(["solve", "--preset", "random-smooth", "--n", "3", "--width", "6",
                     "--height", "5", "--seed", "2", "--out", str(path)]) == 0
    return path


def test_solve_constant_preset(capsys, tmp_path):
    out_file = tmp_path / "c.json"
    code, out, _ = run(capsys, "solve", "--preset", "constant", "--n", "3", "--width", "4",
                       "--height", "4", "--out", out_file)
    report = json.loads(out)
    assert code == 0 and report["sweeps"] == 1 and report["ok"]
    assert all(v["value"] <= 1e-9 for v in report["checks"].values())
    assert json.loads(out_file.read_text())["format"] == "field"


def test_solve_so2_matches_oracle(capsys, tmp_path):
    out_file = tmp_path / "so2.json"
    code, _, _ = run(capsys, "solve", "--preset", "twist", "--n", "2", "--width", "10",
                     "--height", "10", "--out", out_file)
    assert code == 0
    phi = cli.field_from_doc(json.loads(out_file.read_text()))
    doc = json.loads((FIXTURES / "so2_twist_10x10.json").read_text())
    theta = np.array(doc["theta"]).reshape(10, 10).T
    expected = np.array([[lg.rotation_2d(t) for t in row] for row in theta])
    assert np.abs(phi.values - expected).max() <= 1e-8


def test_solve_report_lists_all_checks(capsys, solved_file):
    code, out, _ = run(capsys, "check", "--in", solved_file)
    report = json.loads(out)
    assert code == 0 and report["kind"] == "field"
    assert set(report["checks"]) == {"flatness", "ep", "el", "fe", "noether", "mv1", "mv2",
                                     "conslaw", "epharm", "codiff"}


def test_solve_no_convergence(capsys):
    code, _, err = run(capsys, "solve", "--preset", "random-smooth", "--width", "8",
                       "--height", "8", "--max-sweeps", "3")
    assert code == 2 and "no convergence" in err


@pytest.mark.parametrize("field,value", [("n", "three"), ("width", 1), ("version", 9),
                                         ("format", "mesh")])
def test_malformed_header(capsys, tmp_path, solved_file, field, value):
    doc = json.loads(solved_file.read_text())
    doc[field] = value
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    for cmd in ("check", "reduce"):
        code, _, err = run(capsys, cmd, "--in", bad)
        assert code == 3 and f"'{field}'" in err


def test_malformed_payload(capsys, tmp_path, solved_file):
    doc = json.loads(solved_file.read_text())
    doc["matrices"][4] = [2.0] * 9
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "check", "--in", bad)
    assert code == 3 and "matrices[4]" in err
    doc["matrices"] = doc["matrices"][:-1]
    bad.write_text(json.dumps(doc))
    assert run(capsys, "check", "--in", bad)[0] == 3
    bad.write_text("{not json")
    assert run(capsys, "check", "--in", bad)[0] == 3
    assert run(capsys, "check")[0] == 3


def test_file_roundtrip_is_bit_exact(rng, tmp_path):
    phi = DiscreteField.random(Mesh(4, 3), 3, rng)
    path = tmp_path / "f.json"
    cli.write_json(cli.field_to_doc(phi), path)
    back = cli.field_from_doc(cli.read_json(path))
    assert np.array_equal(back.values, phi.values)
    om = reduce(phi)
    cli.write_json(cli.connection_to_doc(om), path)
    back = cli.connection_from_doc(cli.read_json(path))
    assert np.array_equal(back.u, om.u) and np.array_equal(back.v, om.v)


def test_vertex_order_is_row_major():
    vals = np.zeros((3, 2, 1, 1))
    for i, j in np.ndindex(3, 2):
        vals[i, j] = 10 * j + i
    assert [m[0] for m in cli._matrices_to_list(vals)] == [0, 1, 2, 10, 11, 12]


def test_reduce_reconstruct_roundtrip(capsys, tmp_path, solved_file):
    conn = tmp_path / "conn.json"
    back = tmp_path / "back.json"
    original = cli.field_from_doc(cli.read_json(solved_file))
    assert run(capsys, "reduce", "--in", solved_file, "--out", conn)[0] == 0
    g0 = json.dumps(original[0, 0].tolist())
    assert run(capsys, "reconstruct", "--in", conn, "--base-g0", g0, "--out", back)[0] == 0
    phi = cli.field_from_doc(cli.read_json(back))
    assert np.abs(phi.values - original.values).max() <= 1e-12


def test_reconstruct_other_base(capsys, tmp_path, solved_file, rng):
    conn = tmp_path / "conn.json"
    run(capsys, "reduce", "--in", solved_file, "--out", conn)
    r = lg.random_rotation(3, rng)
    gfile = tmp_path / "g0.json"
    gfile.write_text(json.dumps(r.ravel().tolist()))
    code, out, _ = run(capsys, "reconstruct", "--in", conn, "--base-g0", gfile)
    assert code == 0
    phi = cli.field_from_doc(json.loads(out))
    original = cli.field_from_doc(cli.read_json(solved_file))
    expected = r @ original[0, 0].T @ original.values
    assert np.abs(phi.values - expected).max() <= 1e-12


def test_reconstruct_bad_base(capsys, tmp_path, solved_file):
    conn = tmp_path / "conn.json"
    run(capsys, "reduce", "--in", solved_file, "--out", conn)
    for g0 in ("[[1, 0], [0, 1]]", "[[2, 0, 0], [0, 1, 0], [0, 0, 1]]", "nonsense"):
        code, _, err = run(capsys, "reconstruct", "--in", conn, "--base-g0", g0)
        assert code == 3 and "base-g0" in err


def test_reconstruct_not_flat(capsys):
    path = FIXTURES / "nonflat_so3_connection.json"
    defect = json.loads(path.read_text())["curvature_defect"]
    code, _, err = run(capsys, "reconstruct", "--in", path)
    assert code == 4 and f"{defect:.6e}" in err


def test_check_flags_perturbed_vertex(capsys, tmp_path, solved_file, rng):
    doc = json.loads(solved_file.read_text())
    phi = cli.field_from_doc(doc)
    p = phi.values.copy()
    p[3, 2] = lg.exp(lg.random_algebra(3, rng, 0.05)) @ p[3, 2]
    bad = tmp_path / "bent.json"
    cli.write_json(cli.field_to_doc(DiscreteField(phi.mesh, p)), bad)
    code, out, _ = run(capsys, "check", "--in", bad)
    report = json.loads(out)
    assert code == 1 and not report["ok"]
    assert [3, 2] in report["checks"]["el"]["at"]
    assert not report["checks"]["el"]["ok"] and report["checks"]["flatness"]["ok"]


def test_check_connection_file(capsys, tmp_path, solved_file):
    conn = tmp_path / "conn.json"
    run(capsys, "reduce", "--in", solved_file, "--out", conn)
    code, out, _ = run(capsys, "check", "--in", conn)
    report = json.loads(out)
    assert code == 0 and report["kind"] == "connection"
    assert set(report["checks"]) == {"flatness", "ep"}
    code, out, _ = run(capsys, "check", "--in", FIXTURES / "nonflat_so3_connection.json")
    assert code == 1 and [0, 0] in json.loads(out)["checks"]["flatness"]["at"]


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "eulerpoincare", "solve", "--preset",
                          "constant", "--width", "3", "--height", "3", "--n", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["ok"]
