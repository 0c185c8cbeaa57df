import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from constraint_hessian import orthogonal as og
from constraint_hessian import so3
from constraint_hessian.cli import SWEEP_HEADER, fmt, main
from constraint_hessian.problem import ProblemError, problem_from_dict

BLACK = og.flatten(np.diag([-1.0, -1.0, 1.0])).tolist()
IDENTITY = og.flatten(np.eye(3)).tolist()


@pytest.fixture
def write(tmp_path):
    def _write(obj, name="problem.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return _write


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def family_point(label, alpha):
    return og.flatten(so3.quaternion_to_rotation(so3.set_quaternions(label, alpha))).tolist()


def test_hessian_black(write, capsys):
    path = write({"kind": "so3-example", "alpha": 0.0, "point": BLACK})
    code, out, _ = run(["hessian", path, "--basis", "nu"], capsys)
    res = json.loads(out)
    assert code == 0
    assert np.allclose(res["eigenvalues"], [-4, -2, 0], atol=1e-12)
    assert res["classification"] == "degenerate" and res["critical"]
    assert res["basis"] == ["nu_1", "nu_2", "nu_3"]


def test_hessian_identity_note(write, capsys):
    path = write({"kind": "so3-example", "alpha": 0.0, "quaternion": [1, 0, 0, 0]})
    code, out, _ = run(["hessian", path], capsys)
    res = json.loads(out)
    assert code == 0 and not res["critical"]
    assert np.allclose(res["eigenvalues"], [0, 3, 3], atol=1e-12)
    assert res["note"] == "not a critical point (residual 1)"
    assert np.allclose(res["multipliers"], [0, 3, 3, 0, 0, 0], atol=1e-12)


def test_hessian_orthogonal_single_sample(write, capsys):
    path = write({"kind": "orthogonal", "n": 3, "point": IDENTITY,
                  "cost": {"name": "power2", "samples": [np.eye(3).tolist()]}})
    code, out, _ = run(["hessian", path, "--json"], capsys)
    res = json.loads(out)
    assert code == 0
    assert np.allclose(res["eigenvalues"], [2, 2, 2], atol=1e-12) and res["classification"] == "local-min"
    code, out, _ = run(["verify", path], capsys)
    assert code == 0


def test_hessian_csv(write, capsys):
    path = write({"kind": "so3-example", "alpha": 0.0, "point": BLACK})
    code, out, _ = run(["hessian", path, "--csv", "--basis", "nu"], capsys)
    assert code == 0 and "\r" not in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["quantity", "i", "j", "value"]
    eig = [float(r[3]) for r in rows if r[0] == "eigenvalue"]
    assert np.allclose(eig, [-4, -2, 0], atol=1e-12)
    assert ["classification", "", "", "degenerate"] in rows


def test_hessian_generic_sphere(write, capsys):
    path = write({"kind": "generic", "point": [0, 0.6, 0.8],
                  "constraints": [{"A": np.eye(3).tolist(), "b": [0, 0, 0], "c": 0}],
                  "regular_value": [0.5],
                  "cost": {"name": "quadratic", "A": np.zeros((3, 3)).tolist(), "b": [0, 0, -1], "c": 0}})
    code, out, _ = run(["hessian", path], capsys)
    res = json.loads(out)
    # cost -z on the unit sphere: restricted Hessian is z I
    assert code == 0
    assert np.allclose(res["eigenvalues"], [0.8, 0.8], atol=1e-12)
    code, _, err = run(["hessian", path, "--basis", "nu"], capsys)
    assert code == 2 and "nu basis" in err


def test_sweep_black_three_steps(capsys):
    code, out, _ = run(["sweep", "--alpha-min", "0", "--alpha-max", str(np.pi), "--steps", "3",
                        "--sets", "black"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == SWEEP_HEADER and len(rows) == 4
    for row, alpha in zip(rows[1:], (0.0, np.pi / 2, np.pi)):
        assert float(row[0]) == pytest.approx(alpha, abs=1e-15)
        lam = [float(v) for v in row[2:5]]
        assert np.allclose(lam, so3.black_closed_form(alpha), atol=1e-8)
        assert row[5] == "degenerate"


def test_sweep_green_flips_at_bifurcations(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--sets", "green", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open(newline="")))
    assert len(rows) == 181
    labels = [r["classification"] for r in rows]
    alphas = np.array([float(r["alpha"]) for r in rows])
    flips = [i for i in range(1, len(labels)) if labels[i] != labels[i - 1]]
    for target in (-np.pi / 4, 3 * np.pi / 4):
        nearby = [i for i in flips if alphas[i - 1] - 1e-9 <= target <= alphas[i] + 1e-9]
        assert nearby, target


def test_sweep_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--out", str(a)]) == 0
    assert main(["sweep", "--out", str(b)]) == 0
    data = a.read_bytes()
    assert data == b.read_bytes() and b"\r\n" not in data
    assert len(data.decode().splitlines()) == 1 + 181 * 5


def test_sweep_validation(capsys):
    assert run(["sweep", "--steps", "1"], capsys)[0] == 2
    assert run(["sweep", "--alpha-min", "1", "--alpha-max", "0"], capsys)[0] == 2
    assert run(["sweep", "--sets", "purple"], capsys)[0] == 2
    assert run(["sweep", "--alpha-max", "4"], capsys)[0] == 2


def test_verify_examples(write, capsys, rng):
    path = write({"kind": "so3-example", "alpha": 0.0, "point": IDENTITY})
    code, out, _ = run(["verify", path], capsys)
    assert code == 0 and out.splitlines()[0] == "direction,formula,oracle,abs_diff"
    X = og.random_orthogonal(4, rng)
    A = rng.standard_normal((16, 16))
    path4 = write({"kind": "orthogonal", "n": 4, "point": og.flatten(X).tolist(),
                   "cost": {"name": "quadratic", "A": (A + A.T).tolist(), "b": rng.standard_normal(16).tolist()}},
                  "n4.json")
    assert run(["verify", path4], capsys)[0] == 0
    assert run(["verify", path, "--h", "0.5"], capsys)[0] == 4
    assert run(["verify", path, "--h", "0"], capsys)[0] == 2


def test_off_manifold_exit(write, capsys):
    x = np.array(IDENTITY)
    x[0] += 1e-3
    path = write({"kind": "so3-example", "alpha": 0.0, "point": x.tolist()})
    for cmd in ("hessian", "verify", "stability"):
        code, _, err = run([cmd, path], capsys)
        assert code == 3, cmd
        assert "off" in err


def test_malformed_json_exit(write, capsys):
    path = write('{"kind": "so3-example",\n  "alpha": 0.0,,}')
    code, _, err = run(["hessian", path], capsys)
    assert code == 2 and "line 2" in err and "column" in err


@pytest.mark.parametrize("bad", [
    {"kind": "torus"},
    {"kind": "so3-example", "point": IDENTITY},
    {"kind": "so3-example", "alpha": 0.0},
    {"kind": "orthogonal", "n": 3, "point": IDENTITY},
    {"kind": "orthogonal", "n": 3, "point": IDENTITY, "cost": {"name": "power7"}},
    {"kind": "so3-example", "alpha": 0.0, "point": [1, 2]},
    {"kind": "so3-example", "samples": [np.diag([1, 1, -1.0]).tolist()], "point": IDENTITY},
])
def test_invalid_problem_exit(write, capsys, bad):
    code, _, err = run(["hessian", write(bad)], capsys)
    assert code == 2 and err.startswith("error:")


def test_missing_file_and_bad_args(capsys, tmp_path):
    assert run(["hessian", str(tmp_path / "none.json")], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


@pytest.mark.parametrize("label,verdict,code", [
    ("red", "certified-stable-modulo-(i)", 0),
    ("pink", "not-definite", 5),
    ("black", "inconclusive-degenerate", 5),
])
def test_stability_examples(write, capsys, label, verdict, code):
    path = write({"kind": "so3-example", "alpha": 0.0, "point": family_point(label, 0.0)})
    got, out, _ = run(["stability", path], capsys)
    res = json.loads(out)
    assert got == code and res["verdict"] == verdict and res["decay_check"] == "skipped"


def test_stability_with_vector_field(write, capsys):
    path = write({"kind": "so3-example", "alpha": 0.0, "point": family_point("red", 0.0),
                  "vector_field": "neg-gradient"})
    code, out, _ = run(["stability", path, "--samples", "50", "--seed", "7"], capsys)
    res = json.loads(out)
    assert code == 0 and res["verdict"] == "certified-stable"
    assert res["decay_violations"] == 0 and res["seed"] == 7 and res["samples"] == 50
    _, again, _ = run(["stability", path, "--samples", "50", "--seed", "7"], capsys)
    assert again == out


def test_problem_loader_quaternion_and_samples():
    p = problem_from_dict({"kind": "so3-example", "quaternion": [0, 0, 0, 1],
                           "samples": [m.tolist() for m in so3.example_samples(0.0).samples]})
    assert np.allclose(p.point, BLACK)
    assert p.samples.k == 3
    with pytest.raises(ProblemError):
        problem_from_dict({"kind": "generic", "point": [1.0]})


def test_fmt_round_trips():
    for v in (0.1, np.pi, -1e-300, 1 / 3):
        assert float(fmt(v)) == v


def test_module_entry_point(write):
    path = write({"kind": "so3-example", "alpha": 0.0, "point": BLACK})
    proc = subprocess.run([sys.executable, "-m", "constraint_hessian", "hessian", path, "--basis", "nu"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["classification"] == "degenerate"
