"""Shared fixtures: the worked quadratic pair, its rotation, random generators."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from terninv.forms import Matrix3, TernaryForm, monomials


@pytest.fixture
def f1() -> TernaryForm:
    return TernaryForm(2, {(2, 0, 0): 18, (0, 2, 0): -27, (0, 0, 2): 18})


@pytest.fixture
def f2() -> TernaryForm:
    return TernaryForm(2, {
        (2, 0, 0): 13, (1, 1, 0): 20, (1, 0, 1): -20,
        (0, 2, 0): -2, (0, 1, 1): 40, (0, 0, 2): -2,
    })


@pytest.fixture
def rot13() -> Matrix3:
    third = Fraction(1, 3)
    return Matrix3([
        [2 * third, -third, -2 * third],
        [2 * third, 2 * third, third],
        [third, -2 * third, 2 * third],
    ])


def random_form(rng: random.Random, degree: int, span: int = 9) -> TernaryForm:
    coeffs = {
        key: Fraction(rng.randint(-span, span), rng.randint(1, 4))
        for key in monomials(degree)
    }
    return TernaryForm(degree, coeffs)


def random_rotation(rng: random.Random) -> Matrix3:
    # Rodrigues formula for a uniformly-ish random axis and angle.
    while True:
        u = [rng.gauss(0, 1) for _ in range(3)]
        norm = math.sqrt(sum(c * c for c in u))
        if norm > 1e-6:
            break
    u = [c / norm for c in u]
    theta = rng.uniform(0, 2 * math.pi)
    c, s = math.cos(theta), math.sin(theta)
    ux, uy, uz = u
    return Matrix3([
        [c + ux * ux * (1 - c), ux * uy * (1 - c) - uz * s, ux * uz * (1 - c) + uy * s],
        [uy * ux * (1 - c) + uz * s, c + uy * uy * (1 - c), uy * uz * (1 - c) - ux * s],
        [uz * ux * (1 - c) - uy * s, uz * uy * (1 - c) + ux * s, c + uz * uz * (1 - c)],
    ])


def rel_close(x: float, y: float, tol: float) -> bool:
    return abs(x - y) <= tol * (1.0 + max(abs(x), abs(y)))


def aux_generator_expressions():
    """The 13 auxiliary quartic generators as expressions in the minimal
    slice symbols (quartic slice-coordinate conversion derived from the
    recorded scale factors)."""
    from terninv.harmonic import slice_basis
    from terninv.reference import reference_scales
    from terninv.rewrite import constant, minimal_symbols, symbol

    table = minimal_symbols(2)
    sym = lambda name: symbol(table, name)
    const = lambda v: constant(table, v)

    scales = reference_scales(4)
    basis = slice_basis(2)
    # map each slice block to its source family index and scale
    by_family = {}
    for j, block in enumerate(basis.blocks):
        if block.label.startswith("deg4.j"):
            by_family[int(block.label.split("j")[-1])] = j
    r_j, s_j, t_j = by_family[0], by_family[1], by_family[2]
    quad_j = next(j for j, b in enumerate(basis.blocks) if b.label == "quad")

    def coord(i, j):
        return sym("a%d" % i) if j == 0 else sym(f"al[{i}][{j}]")

    lam = [coord(i, quad_j) for i in (1, 2, 3)]
    r = [const(scales[(1, 0)]) * coord(i, r_j) for i in (1, 2, 3)]
    s = [const(scales[(1, 1)]) * coord(i, s_j) for i in (1, 2, 3)]
    t = [const(scales[(1, 2)]) * coord(i, t_j) for i in (1, 2, 3)]

    exprs = {
        "Ilam1": lam[0] + lam[1] + lam[2],
        "Ilam2": lam[0] ** 2 + lam[1] ** 2 + lam[2] ** 2,
        "Ilam3": lam[0] ** 3 + lam[1] ** 3 + lam[2] ** 3,
        "It0": t[0] * t[1] * t[2],
    }
    det = (lam[1] - lam[0]) * (lam[2] - lam[0]) * (lam[2] - lam[1])
    bracket = (lam[0] - lam[1]) * (lam[1] - lam[2]) * (lam[2] - lam[0])  # == det
    inv_rows = (
        (lam[1] * lam[2] * (lam[2] - lam[1]),
         -(lam[0] * lam[2] * (lam[2] - lam[0])),
         lam[0] * lam[1] * (lam[1] - lam[0])),
        (-(lam[2] ** 2 - lam[1] ** 2), lam[2] ** 2 - lam[0] ** 2,
         -(lam[1] ** 2 - lam[0] ** 2)),
        (lam[2] - lam[1], -(lam[2] - lam[0]), lam[1] - lam[0]),
    )
    # The s-column carries the alternating factor, which cancels the
    # Vandermonde determinant: those entries are polynomial.
    for i in range(3):
        exprs[f"Is{i + 1}"] = (inv_rows[i][0] * s[0] * t[0]
                               + inv_rows[i][1] * s[1] * t[1]
                               + inv_rows[i][2] * s[2] * t[2])
    columns = {
        "Ir": r,
        "It": [t[m] * t[m] for m in range(3)],
    }
    for name, col in columns.items():
        for i in range(3):
            num = (inv_rows[i][0] * col[0] + inv_rows[i][1] * col[1]
                   + inv_rows[i][2] * col[2])
            exprs[f"{name}{i + 1}"] = num / det
    return exprs
