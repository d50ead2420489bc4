import json
import os
import random
from fractions import Fraction

import pytest

from terninv.cli import main
from terninv.forms import TernaryForm, form_to_json, monomial, multiply, form_q, save_form
from terninv.harmonic import linear_combination, slice_basis
from terninv.invariants import invariants_to_json, slice_invariants
from terninv.meshes import icosphere, sample_surface, write_obj

from conftest import random_form


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def f1_file(tmp_path, f1):
    return write_json(tmp_path / "f1.json", form_to_json(f1))


@pytest.fixture
def f2_file(tmp_path, f2):
    return write_json(tmp_path / "f2.json", form_to_json(f2))


def generic_quartic():
    rng = random.Random(2024)
    return random_form(rng, 4)


def test_cmd_basis_text(capsys):
    assert main(["basis", "--degree", "4"]) == 0
    out = capsys.readouterr().out
    assert "relation: none" in out
    assert "scales vs integer-normalized reference" in out


def test_cmd_basis_json_degrees(capsys):
    for degree, relation, count in ((4, "none", 9), (6, "equal", 15), (8, "sum", 18)):
        assert main(["basis", "--degree", str(degree), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["relation"] == relation
        assert len(payload["elements"]) == count


def test_cmd_basis_slice_json(capsys):
    assert main(["basis", "--degree", "6", "--slice", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["k"] == 8
    assert "w_infinity" in payload
    assert len(payload["elements"]) == 24


def test_cmd_basis_rejects_odd():
    assert main(["basis", "--degree", "5"]) == 1


def test_cmd_invariants_quartic(tmp_path, capsys):
    path = write_json(tmp_path / "v.json", form_to_json(generic_quartic()))
    assert main(["invariants", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["d"] == 2
    assert len(payload["p0"]) == 3
    assert len(payload["p"][0]) == 3


def test_cmd_invariants_degree2(f1_file, capsys):
    assert main(["invariants", f1_file]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"degree": 2, "e1": "9", "e2": "-2592", "e3": "-34992"}


def test_cmd_invariants_degenerate(tmp_path, f1, capsys):
    degen = multiply(form_q(), f1)
    path = write_json(tmp_path / "degen.json", form_to_json(degen))
    assert main(["invariants", path]) == 2
    assert "undefined" in capsys.readouterr().err


def test_cmd_invariants_degree_mismatch(tmp_path):
    path = write_json(tmp_path / "v.json", form_to_json(generic_quartic()))
    assert main(["invariants", path, "--degree", "6"]) == 1


def test_cmd_invariants_directory(tmp_path, f1, capsys):
    write_json(tmp_path / "a.json", form_to_json(generic_quartic()))
    write_json(tmp_path / "b.json", form_to_json(multiply(form_q(), f1)))
    code = main(["invariants", str(tmp_path)])
    payload = json.loads(capsys.readouterr().out)
    assert code == 2  # one degenerate member
    assert payload["a.json"]["d"] == 2
    assert payload["b.json"]["error"] == "degenerate"


def test_cmd_equiv_quadratic(f1_file, f2_file, capsys):
    assert main(["equiv", f1_file, f2_file]) == 0
    assert capsys.readouterr().out.strip() == "Equivalent"


def test_cmd_equiv_quartic(tmp_path, capsys):
    from terninv.forms import act
    from conftest import random_rotation

    rng = random.Random(5)
    v = generic_quartic()
    w = act(random_rotation(rng), v)
    pv = write_json(tmp_path / "v.json", form_to_json(v))
    pw = write_json(tmp_path / "w.json", form_to_json(w))
    assert main(["equiv", pv, pw]) == 0
    assert capsys.readouterr().out.strip() == "Equivalent"
    other = random_form(rng, 4)
    po = write_json(tmp_path / "o.json", form_to_json(other))
    assert main(["equiv", pv, po]) == 0
    assert capsys.readouterr().out.strip() == "Distinct"


def test_cmd_reconstruct_round_trip(tmp_path, capsys):
    path_v = write_json(tmp_path / "v.json", form_to_json(generic_quartic()))
    assert main(["invariants", path_v]) == 0
    mu = json.loads(capsys.readouterr().out)
    path_mu = write_json(tmp_path / "mu.json", mu)
    out = tmp_path / "form.json"
    assert main(["reconstruct", path_mu, "-o", str(out)]) == 0
    rebuilt = json.loads(out.read_text())
    assert rebuilt["degree"] == 4
    # evaluating the reconstructed form reproduces the prescribed values
    assert main(["invariants", str(out)]) == 0
    payload = json.loads(capsys.readouterr().out)
    for key in ("p0", "p"):
        want = mu[key]
        got = payload[key]
        flat_w = want if key == "p0" else [x for row in want for x in row]
        flat_g = got if key == "p0" else [x for row in got for x in row]
        for a, b in zip(flat_g, flat_w):
            assert abs(float(a) - float(b)) <= 1e-6 * (1 + max(abs(float(a)), abs(float(b))))


def test_cmd_reconstruct_rejects(tmp_path, capsys):
    basis = slice_basis(2)
    mu = {
        "d": 2,
        "p0": [-14.0, 6.0, 98.0],
        "p": [[0.0] * 3, [0.0] * 3, [0.0] * 3],
        "ordering": {"zeta": list(basis.signature.zeta), "xi": list(basis.signature.xi)},
    }
    path = write_json(tmp_path / "mu.json", mu)
    assert main(["reconstruct", path]) == 4


def test_cmd_rewrite(capsys):
    assert main(["rewrite", "a1^2 + a2^2 + a3^2", "--degree", "4",
                 "--verify", "5", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "P[1][0]" in out and "verification (5 samples): ok" in out
    assert main(["rewrite", "a1 + a2", "--degree", "4"]) == 3
    assert main(["rewrite", "lam1 + lam2 + lam3", "--degree", "4", "--aux"]) == 0
    assert "Ilam1" in capsys.readouterr().out


def test_cmd_render(tmp_path, capsys):
    vr1 = TernaryForm(4, {(0, 4, 0): 1, (0, 2, 2): -6, (0, 0, 4): 1})
    form_path = write_json(tmp_path / "vr1.json", form_to_json(vr1))
    out = tmp_path / "vr1.obj"
    assert main(["render", form_path, "--subdiv", "2", "-o", str(out)]) == 0
    text = out.read_text().splitlines()
    n_v = sum(1 for line in text if line.startswith("v "))
    n_f = sum(1 for line in text if line.startswith("f "))
    assert n_v == 162 and n_f == 320  # icosphere at subdivision 2
    assert any(line == "usemtl positive" for line in text)
    assert any(line == "usemtl negative" for line in text)
    for line in text:
        if line.startswith("f "):
            idx = [int(tok) for tok in line.split()[1:]]
            assert all(1 <= i <= n_v for i in idx)


def test_icosphere_counts():
    v0, f0 = icosphere(0)
    assert len(v0) == 12 and len(f0) == 20
    v1, f1 = icosphere(1)
    assert len(v1) == 42 and len(f1) == 80
    for x, y, z in v1:
        assert abs(x * x + y * y + z * z - 1.0) < 1e-12


def test_sample_surface_scaling():
    mesh = sample_surface(form_q(), 1)
    # q is 1 on the sphere: vertices stay on the unit sphere.
    for (x, y, z), s in zip(mesh.vertices, mesh.scalars):
        assert abs(s - 1.0) < 1e-12
        assert abs(x * x + y * y + z * z - 1.0) < 1e-12
