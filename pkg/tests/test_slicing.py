import math
import random
from fractions import Fraction

import pytest

from terninv.forms import (
    Matrix3,
    TernaryForm,
    act,
    add,
    form_q,
    monomial,
    multiply,
    scale,
    signed_permutation_group,
)
from terninv.harmonic import linear_combination, slice_basis, spanning_set
from terninv.slicing import (
    DegenerateForm,
    EigenDecomposition,
    SymmetricMatrix3,
    eigendecompose,
    quadratic_matrix,
    rotate_to_slice,
)

from conftest import random_form, random_rotation, rel_close


def test_quadratic_matrix(f1):
    A = quadratic_matrix(f1)
    assert (A.a11, A.a22, A.a33) == (18, -27, 18)
    assert (A.a12, A.a13, A.a23) == (0, 0, 0)
    B = quadratic_matrix(monomial(1, 1, 0))
    assert B.a12 == Fraction(1, 2) and B.a11 == 0
    C = quadratic_matrix(form_q())
    assert (C.a11, C.a22, C.a33) == (1, 1, 1)
    with pytest.raises(ValueError):
        quadratic_matrix(monomial(4, 0, 0))


def test_eigendecompose_diagonal(f1):
    eig = eigendecompose(quadratic_matrix(f1))
    assert eig.eigenvalues == (18.0, 18.0, -27.0)
    assert eig.gap == 0.0


def test_eigendecompose_rotated_pair(f2):
    eig = eigendecompose(quadratic_matrix(f2))
    for got, expected in zip(eig.eigenvalues, (18.0, 18.0, -27.0)):
        assert abs(got - expected) <= 1e-9 * 30
    assert eig.rotation.orthogonality_defect() <= 1e-12


def test_eigendecompose_identity():
    eig = eigendecompose(quadratic_matrix(form_q()))
    assert eig.eigenvalues == (1.0, 1.0, 1.0)
    assert eig.rotation == Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def test_eigendecompose_backward_stability():
    rng = random.Random(23)
    for _ in range(1000):
        entries = [rng.uniform(-1, 1) for _ in range(6)]
        A = SymmetricMatrix3(*entries)
        eig = eigendecompose(A)
        g = eig.rotation
        assert g.orthogonality_defect() <= 1e-12
        rows = A.rows()
        # reconstruct g A g^T and compare with diag(eigenvalues)
        ga = [[sum(g[(i, m)] * rows[m][j] for m in range(3)) for j in range(3)]
              for i in range(3)]
        gagt = [[sum(ga[i][m] * g[(j, m)] for m in range(3)) for j in range(3)]
                for i in range(3)]
        bound = 1e-9 * (1.0 + A.max_abs())
        for i in range(3):
            for j in range(3):
                target = eig.eigenvalues[i] if i == j else 0.0
                assert abs(gagt[i][j] - target) <= bound


def test_rotate_to_slice_already_diagonal():
    # Slice form with distinct diagonal: rotation must be a signed permutation.
    rng = random.Random(3)
    basis = slice_basis(2)
    v = add(
        add(scale(basis.w(1, 3), 3), scale(basis.w(2, 3), 1)),
        add(scale(basis.w(3, 3), -2), scale(basis.w(1, 0), Fraction(1, 2))),
    )
    coords, g = rotate_to_slice(v)
    entries = sorted(abs(g[(i, j)]) for i in range(3) for j in range(3))
    assert entries[:6] == [0.0] * 6 and all(abs(e - 1.0) < 1e-12 for e in entries[6:])
    # Quadratic block must hold the eigenvalues sorted descending.
    assert [round(c) for c in coords.block(3)] == [3, 1, -2]


def test_rotate_to_slice_degenerate(f1):
    # q^{d-1} * f1 has a repeated quadratic spectrum; adding a harmonic
    # element does not change that.
    v = multiply(form_q(), f1)
    v = add(v, spanning_set(2).element(1, 2))
    with pytest.raises(DegenerateForm):
        rotate_to_slice(v)
    with pytest.raises(ValueError):
        rotate_to_slice(f1)


def test_rotate_to_slice_recovers_coordinates():
    rng = random.Random(41)
    basis = slice_basis(2)
    for _ in range(5):
        v = random_form(rng, 4)
        try:
            coords, _ = rotate_to_slice(v)
        except DegenerateForm:
            continue
        R = random_rotation(rng)
        coords2, _ = rotate_to_slice(act(R, v))
        flat1 = [float(c) for c in coords.a] + [float(c) for row in coords.alpha for c in row]
        flat2 = [float(c) for c in coords2.a] + [float(c) for row in coords2.alpha for c in row]
        # Same B3 orbit: some signed permutation relates the two coordinate sets.
        matched = False
        for _, _, g in signed_permutation_group():
            w1 = linear_combination(basis, coords)
            try:
                back = act(g, w1)
            except ValueError:
                continue
            from terninv.harmonic import slice_coordinates
            try:
                moved = slice_coordinates(back)
            except Exception:
                continue
            flat_m = [float(c) for c in moved.a] + [float(c) for row in moved.alpha for c in row]
            if all(rel_close(x, y, 1e-6) for x, y in zip(flat_m, flat2)):
                matched = True
                break
        assert matched
