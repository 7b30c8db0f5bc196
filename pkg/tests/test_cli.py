import json
import subprocess
import sys

import numpy as np
import pytest

from equimaps import lie_core as lc
from equimaps.cli import dumps, main, parse_rep
from equimaps.exceptions import SpecError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_basis_h2_point(capsys):
    code, out, _ = run(["basis", "--geometry", "h2", "--rep", "endo_conj(defining)",
                        "--points", "[[2, 3]]"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["geometry", "rep", "m", "m_prime", "matrix_shape",
                         "invariant_vectors", "evaluations"]
    assert doc["m"] == 2 and doc["m_prime"] == 1
    k = np.array(doc["evaluations"][0]["kernels"][1])
    assert np.allclose(k, [[2 / 3, -13 / 3], [1 / 3, -2 / 3]], atol=1e-14)


def test_basis_trivial_sphere(capsys):
    code, out, _ = run(["basis", "--geometry", "sphere(2)", "--rep", "trivial",
                        "--points", "[[0, 0, 1]]"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["m"] == 1
    assert doc["evaluations"][0]["kernels"] == [[1]]


def test_basis_h3_base_point_is_quaternion_basis(capsys):
    code, out, _ = run(["basis", "--geometry", "h3", "--rep", "endo_conj(realify(defining))",
                        "--points", "[[1, 0, 0, 0]]"], capsys)
    ks = [np.array(k) for k in json.loads(out)["evaluations"][0]["kernels"]]
    i = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    j = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
    k = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])
    for got, want in zip(ks, [np.eye(4), i, j, k]):
        assert np.abs(got - want).max() < 1e-12


def test_complex_values_are_pairs(capsys):
    code, out, _ = run(["basis", "--geometry", "riemann-sphere", "--rep", "su2_poly(2)",
                        "--points", '[[0.5, 1], "inf"]'], capsys)
    doc = json.loads(out)
    at_inf = doc["evaluations"][1]
    assert at_inf["point"] == "inf"
    assert at_inf["kernels"][0] == [[0, 0], [-1, 0], [0, 0]]


def test_check_exit_codes(capsys):
    code, out, _ = run(["check", "--geometry", "h2", "--rep", "endo_conj(defining)",
                        "--sample", "20", "--group-samples", "20"], capsys)
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(["check", "--geometry", "sphere(2)", "--rep", "trivial"], capsys)
    assert code == 0 and json.loads(out)["residual"] == 0


def test_check_perturb_scales_linearly(capsys):
    res = {}
    for eps in (1e-3, 1e-4):
        code, out, _ = run(["check", "--geometry", "sphere(2)", "--rep", "endo_conj(defining)",
                            "--perturb", str(eps), "--sample", "30", "--group-samples", "30"],
                           capsys)
        assert code == 1
        res[eps] = json.loads(out)["residual"]
    assert 1e-4 < res[1e-3] < 1e-2
    assert res[1e-3] / res[1e-4] == pytest.approx(10, rel=1e-3)


def test_check_kernel_constraint_for_hom(capsys):
    code, out, _ = run(["check", "--geometry", "sphere(2)", "--rep", "hom(defining, defining)",
                        "--sample", "10", "--group-samples", "10"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["kernel_constraint_residual"] < 1e-8


def test_classify_h3(capsys):
    code, out, _ = run(["classify", "--geometry", "h3", "--rep", "endo_conj(realify(defining))"],
                       capsys)
    doc = json.loads(out)
    assert code == 0 and doc["summary"] == [["H", 1]]
    cert = doc["blocks"][0]["certificate"]
    i, j = np.array(cert["I"]), np.array(cert["J"])
    assert np.abs(i @ j + j @ i).max() < 1e-10


def test_classify_needs_algebra_rep(capsys):
    code, _, err = run(["classify", "--geometry", "h2", "--rep", "defining"], capsys)
    assert code == 2 and json.loads(err)["exit_code"] == 2


def test_tangent(capsys):
    for names, dim in ((["so(3)", "so(2)"], 0), (["sl(2,R)", "so(2)"], 0), (["so(3)", "0"], 3),
                       (["sl(2,C)", "su(2)"], 0), (["se(2)", "so(2)"], 0)):
        code, out, _ = run(["tangent"] + names, capsys)
        assert code == 0 and json.loads(out)["dim"] == dim, names
    code, out, _ = run(["tangent", "--geometry", "riemann-sphere"], capsys)
    assert json.loads(out)["dim"] == 0
    code, _, _ = run(["tangent", "so(3)"], capsys)
    assert code == 2


def test_section(capsys):
    code, out, _ = run(["section", "--geometry", "sphere(2)", "--points", "[[0, 0, 1]]"], capsys)
    doc = json.loads(out)
    assert doc["evaluations"][0]["section"] == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]


@pytest.mark.parametrize(
    "argv",
    [
        ["basis", "--geometry", "nowhere", "--rep", "trivial"],
        ["basis", "--geometry", "h2", "--rep", "endo_conj(defining"],
        ["basis", "--geometry", "h2", "--rep", "mystery"],
        ["basis", "--geometry", "h3", "--rep", "defining"],
        ["basis", "--geometry", "h2", "--rep", "trivial", "--points", "[[0, -1]]"],
        ["basis", "--geometry", "h2", "--rep", "trivial", "--points", "{"],
        ["basis", "--geometry", "h2"],
        ["section"],
    ],
)
def test_spec_errors_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and out == ""
    assert set(json.loads(err)) == {"error", "message", "exit_code"}


def test_numerical_error_exit_3(capsys, monkeypatch):
    from equimaps import cli
    from equimaps.exceptions import ClosureError

    def boom(*a, **k):
        raise ClosureError("forced")

    monkeypatch.setattr(cli, "classify_commutant", boom)
    code, _, err = run(["classify", "--geometry", "h3", "--rep", "endo_conj(realify(defining))"],
                       capsys)
    assert code == 3 and json.loads(err)["error"] == "ClosureError"


def test_parser_operators():
    g = lc.so_group(3)
    assert parse_rep("defining + trivial", g).dim == 4
    assert parse_rep("defining ⊕ defining * defining", g).dim == 12
    assert parse_rep("(defining + trivial) * trivial", g).dim == 4
    assert parse_rep("det_twist(defining, -1)", g).dim == 3
    assert parse_rep("dsum(trivial, trivial, defining)", g).dim == 5
    for bad in ("", "defining)", "tensor(defining)", "defining $", "su2_poly(x)"):
        with pytest.raises(SpecError):
            parse_rep(bad, g)


def test_float_formatting_round_trips():
    vals = [0.1, 1 / 3, -2.5e-300, 1e22, float(np.pi), -0.0]
    text = dumps(vals)
    assert text.endswith("\n")
    assert json.loads(text) == [abs(v) if v == 0 else v for v in vals]
    assert dumps({"z": 1 + 2j}) == '{"z": [1, 2]}\n'


def test_output_file_and_determinism(tmp_path, capsys):
    files = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code = main(["basis", "--geometry", "h3", "--rep", "endo_conj(realify(defining))",
                     "--sample", "5", "--seed", "7", "--output", str(path)])
        assert code == 0
        files.append(path.read_bytes())
    assert files[0] == files[1]
    assert b"\r" not in files[0]


def test_parallel_matches_serial(capsys):
    argv = ["basis", "--geometry", "h2", "--rep", "endo_conj(defining)", "--sample", "12"]
    _, serial, _ = run(argv, capsys)
    _, par, _ = run(argv + ["--parallel"], capsys)
    assert serial == par


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "equimaps.cli", "tangent", "so(3)", "so(2)"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["dim"] == 0
