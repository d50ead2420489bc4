import random
from fractions import Fraction

import pytest

from terninv.forms import (
    Matrix3,
    TernaryForm,
    act,
    add,
    apolar,
    diagonal_matrix,
    evaluate,
    form_from_json,
    form_q,
    form_to_json,
    identity_matrix,
    laplacian,
    monomial,
    multiply,
    scale,
    signed_permutation_group,
    sub,
    zero_form,
)

from conftest import random_form


def test_monomial_constructors():
    assert monomial(2, 0, 0, 1) == TernaryForm(2, {(2, 0, 0): 1})
    assert monomial(0, 3, 1, -1) == TernaryForm(4, {(0, 3, 1): -1})
    assert monomial(1, 1, 1, Fraction(1, 2)) == TernaryForm(3, {(1, 1, 1): Fraction(1, 2)})
    with pytest.raises(ValueError):
        monomial(-1, 0, 0)


def test_zero_pruning_and_degree_checks():
    assert TernaryForm(2, {(2, 0, 0): 0}).is_zero()
    with pytest.raises(ValueError):
        TernaryForm(2, {(1, 0, 0): 1})
    with pytest.raises(ValueError):
        add(monomial(2, 0, 0), monomial(3, 0, 0))


def test_product_q_squared():
    q = form_q()
    expected = TernaryForm(4, {
        (4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1,
        (2, 2, 0): 2, (2, 0, 2): 2, (0, 2, 2): 2,
    })
    assert multiply(q, q) == expected


def test_add_cancellation_and_scale():
    assert add(monomial(2, 0, 0), monomial(2, 0, 0, -1)) == zero_form(2)
    v = sub(monomial(0, 3, 1), monomial(0, 1, 3))
    assert scale(v, 6) == TernaryForm(4, {(0, 3, 1): 6, (0, 1, 3): -6})


def test_act_sign_change():
    g = diagonal_matrix(1, 1, -1)
    assert act(g, monomial(0, 3, 1)) == monomial(0, 3, 1, -1)


def test_act_identity(f2):
    assert act(identity_matrix(), f2) == f2


def test_act_rotation_witness(f1, f2, rot13):
    assert act(rot13, f1) == f2


def test_act_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        act(diagonal_matrix(2, 1, 1), monomial(2, 0, 0))


def test_act_composition_all_48():
    rng = random.Random(7)
    v = random_form(rng, 4)
    group = signed_permutation_group()
    for _, _, g1 in group[::7]:
        for _, _, g2 in group:
            assert act(g1, act(g2, v)) == act(g1 @ g2, v)


def test_apolar_definition():
    assert apolar(monomial(2, 1, 0), monomial(2, 1, 0)) == 2
    assert apolar(monomial(2, 1, 0), monomial(1, 2, 0)) == 0
    with pytest.raises(ValueError):
        apolar(monomial(2, 0, 0), monomial(3, 0, 0))


def test_apolar_invariant_under_rotation(f1, rot13):
    lhs = apolar(act(rot13, f1), act(rot13, f1))
    assert lhs == apolar(f1, f1) == 2754


def test_apolar_invariant_under_signed_permutations():
    rng = random.Random(11)
    group = signed_permutation_group()
    for degree in (2, 4, 6, 8):
        v = random_form(rng, degree)
        w = random_form(rng, degree)
        expected = apolar(v, w)
        for _, _, g in rng.sample(group, 8):
            assert apolar(act(g, v), act(g, w)) == expected


def test_apolar_laplacian_adjunction():
    # <v, q w> at degree 2d equals <laplacian(v), w> at degree 2d-2.
    rng = random.Random(13)
    q = form_q()
    for degree in (4, 6, 8):
        v = random_form(rng, degree)
        w = random_form(rng, degree - 2)
        assert apolar(v, multiply(q, w)) == apolar(laplacian(v), w)


def test_laplacian_basics():
    assert laplacian(monomial(4, 0, 0)) == monomial(2, 0, 0, 12)
    vr1 = TernaryForm(4, {(0, 4, 0): 1, (0, 2, 2): -6, (0, 0, 4): 1})
    assert laplacian(vr1).is_zero()
    with pytest.raises(ValueError):
        laplacian(monomial(1, 0, 0))


def test_laplacian_of_q_times_x2():
    qx2 = multiply(form_q(), monomial(2, 0, 0))
    assert qx2 == TernaryForm(4, {(4, 0, 0): 1, (2, 2, 0): 1, (2, 0, 2): 1})
    expected = TernaryForm(2, {(2, 0, 0): 16, (0, 2, 0): 2, (0, 0, 2): 2})
    assert laplacian(qx2) == expected
    # Cross-check through the adjunction identity.
    for w in (monomial(2, 0, 0), monomial(1, 1, 0), monomial(0, 1, 1)):
        assert apolar(laplacian(qx2), w) == apolar(qx2, multiply(form_q(), w))


def test_evaluate(f1):
    assert evaluate(f1, (1, 0, 0)) == 18
    assert abs(evaluate(form_q(), (0.6, 0.8, 0.0)) - 1.0) < 1e-12
    assert evaluate(monomial(2, 2, 0), (1, 2, 3)) == 4


def test_json_round_trip():
    v = TernaryForm(4, {(4, 0, 0): Fraction(-3, 7), (2, 1, 1): 5})
    data = form_to_json(v)
    assert data["coefficients"]["4,0,0"] == "-3/7"
    assert data["coefficients"]["2,1,1"] == "5"
    assert form_from_json(data) == v


def test_json_float_round_trip():
    v = TernaryForm(2, {(2, 0, 0): 0.5, (0, 2, 0): -1.25})
    back = form_from_json(form_to_json(v))
    assert back == v and not back.exact
