"""Reduction of a form to the slice of diagonal quadratic component.

The quadratic component of the harmonic decomposition is diagonalized
numerically with a cyclic 3x3 Jacobi iteration (deterministic sweep order,
machine-precision off-diagonal target), the resulting rotation is applied
to the whole form, and the rotated form is projected onto the slice basis.
Forms whose quadratic component has (numerically) repeated eigenvalues are
rejected: the rational invariants are undefined there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .forms import Coeff, Matrix3, TernaryForm, act
from .harmonic import SliceCoordinates, harmonic_decompose, slice_coordinates

DEFAULT_GAP_TOL = 1e-7
_JACOBI_OFF_TOL = 1e-14
_MAX_SWEEPS = 64


class DegenerateForm(Exception):
    """Quadratic spectrum is (numerically) repeated; invariants undefined here."""


@dataclass(frozen=True)
class SymmetricMatrix3:
    a11: Coeff
    a22: Coeff
    a33: Coeff
    a12: Coeff
    a13: Coeff
    a23: Coeff

    def rows(self):
        return (
            (self.a11, self.a12, self.a13),
            (self.a12, self.a22, self.a23),
            (self.a13, self.a23, self.a33),
        )

    def max_abs(self) -> float:
        return max(abs(float(e)) for row in self.rows() for e in row)


def quadratic_matrix(v2: TernaryForm) -> SymmetricMatrix3:
    """Symmetric matrix of a quadratic form (off-diagonal entries halved)."""
    if v2.degree != 2:
        raise ValueError("quadratic_matrix requires a degree-2 form")

    def half(key):
        c = v2[key]
        return c / 2 if isinstance(c, Fraction) else c / 2.0

    return SymmetricMatrix3(
        a11=v2[(2, 0, 0)], a22=v2[(0, 2, 0)], a33=v2[(0, 0, 2)],
        a12=half((1, 1, 0)), a13=half((1, 0, 1)), a23=half((0, 1, 1)),
    )


@dataclass(frozen=True)
class EigenDecomposition:
    rotation: Matrix3          # numeric, orthogonal; rotation A rotation^T diagonal
    eigenvalues: tuple[float, float, float]  # sorted descending
    gap: float                 # min pairwise eigenvalue distance


def eigendecompose(A: SymmetricMatrix3) -> EigenDecomposition:
    """Cyclic Jacobi iteration; deterministic for identical input bits."""
    a = [[float(e) for e in row] for row in A.rows()]
    v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    scale = 1.0 + max(abs(a[i][j]) for i in range(3) for j in range(3))

    for _ in range(_MAX_SWEEPS):
        off = max(abs(a[0][1]), abs(a[0][2]), abs(a[1][2]))
        if off <= _JACOBI_OFF_TOL * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p][q]
            if apq == 0.0:
                continue
            theta = (a[q][q] - a[p][p]) / (2.0 * apq)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            for k in range(3):
                akp, akq = a[k][p], a[k][q]
                a[k][p] = c * akp - s * akq
                a[k][q] = s * akp + c * akq
            for k in range(3):
                akp, akq = a[p][k], a[q][k]
                a[p][k] = c * akp - s * akq
                a[q][k] = s * akp + c * akq
            for k in range(3):
                vkp, vkq = v[k][p], v[k][q]
                v[k][p] = c * vkp - s * vkq
                v[k][q] = s * vkp + c * vkq

    diag = [a[0][0], a[1][1], a[2][2]]
    order = sorted(range(3), key=lambda i: -diag[i])
    eigenvalues = tuple(diag[i] for i in order)
    rotation = Matrix3([[v[r][order[m]] for r in range(3)] for m in range(3)])
    gap = min(
        abs(eigenvalues[0] - eigenvalues[1]),
        abs(eigenvalues[1] - eigenvalues[2]),
        abs(eigenvalues[0] - eigenvalues[2]),
    )
    return EigenDecomposition(rotation, eigenvalues, gap)


def rotate_to_slice(
    v: TernaryForm, tol: float = DEFAULT_GAP_TOL
) -> tuple[SliceCoordinates, Matrix3]:
    """Rotate v into the slice and return its coordinates plus the rotation used.

    Raises DegenerateForm when the quadratic component's eigenvalue gap falls
    below tol * (1 + max |A|): at such points the invariants are undefined.
    """
    if v.degree % 2 or v.degree < 4:
        raise ValueError("rotate_to_slice requires even degree >= 4")
    components = harmonic_decompose(v)
    A = quadratic_matrix(components.quadratic_part)
    eig = eigendecompose(A)
    if eig.gap <= tol * (1.0 + A.max_abs()):
        raise DegenerateForm("invariants undefined at forms with repeated quadratic spectrum")
    rotated = act(eig.rotation, v)
    return slice_coordinates(rotated), eig.rotation
