"""Exact arithmetic for homogeneous ternary polynomials.

A form of degree n in x, y, z is stored as a sparse map from exponent
triples (i, j, k) with i+j+k == n to coefficients.  Coefficients are
``fractions.Fraction`` for exact work; the numeric pipeline (rotating a
form by a floating-point eigenvector matrix) uses the same class with
``float`` coefficients.  Zero coefficients are never stored, so equality
of forms is equality of the coefficient maps.

Canonical term order is graded lex with (i, j, k) descending, used for
deterministic serialization and for coefficient vectors handed to the
linear-algebra layer.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Coeff = Union[Fraction, float]
Triple = tuple[int, int, int]

_NUMERIC_ORTHO_TOL = 1e-10


def _to_coeff(c) -> Coeff:
    if isinstance(c, (Fraction, float)):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type: {type(c).__name__}")


class TernaryForm:
    """Homogeneous polynomial in x, y, z with exact or float coefficients."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Mapping[Triple, Coeff] | None = None):
        if degree < 0:
            raise ValueError("degree must be non-negative")
        self.degree = degree
        clean: dict[Triple, Coeff] = {}
        for key, val in (coeffs or {}).items():
            i, j, k = key
            if i < 0 or j < 0 or k < 0 or i + j + k != degree:
                raise ValueError(f"exponent triple {key} incompatible with degree {degree}")
            val = _to_coeff(val)
            if val != 0:
                clean[(i, j, k)] = val
        self.coeffs = clean

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs.values())

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, key: Triple) -> Coeff:
        return self.coeffs.get(key, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TernaryForm):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"TernaryForm(degree={self.degree}, {format_form(self)!r})"

    def terms(self) -> Iterator[tuple[Triple, Coeff]]:
        """Terms in canonical (graded-lex descending) order."""
        for key in sorted(self.coeffs, reverse=True):
            yield key, self.coeffs[key]


def monomial(i: int, j: int, k: int, c: Coeff | int | str = 1) -> TernaryForm:
    """The form c * x^i y^j z^k."""
    if i < 0 or j < 0 or k < 0:
        raise ValueError("exponents must be non-negative")
    return TernaryForm(i + j + k, {(i, j, k): _to_coeff(c)})


def zero_form(degree: int) -> TernaryForm:
    return TernaryForm(degree, {})


def form_q() -> TernaryForm:
    """The distinguished quadratic x^2 + y^2 + z^2, fixed by every orthogonal map."""
    one = Fraction(1)
    return TernaryForm(2, {(2, 0, 0): one, (0, 2, 0): one, (0, 0, 2): one})


def add(lhs: TernaryForm, rhs: TernaryForm) -> TernaryForm:
    if lhs.degree != rhs.degree:
        raise ValueError(f"degree mismatch: {lhs.degree} vs {rhs.degree}")
    out = dict(lhs.coeffs)
    for key, val in rhs.coeffs.items():
        out[key] = out.get(key, 0) + val
    return TernaryForm(lhs.degree, out)


def sub(lhs: TernaryForm, rhs: TernaryForm) -> TernaryForm:
    return add(lhs, scale(rhs, -1))


def scale(v: TernaryForm, c: Coeff | int | str) -> TernaryForm:
    c = _to_coeff(c)
    if c == 0:
        return zero_form(v.degree)
    return TernaryForm(v.degree, {key: val * c for key, val in v.coeffs.items()})


def multiply(lhs: TernaryForm, rhs: TernaryForm) -> TernaryForm:
    out: dict[Triple, Coeff] = {}
    for (i1, j1, k1), c1 in lhs.coeffs.items():
        for (i2, j2, k2), c2 in rhs.coeffs.items():
            key = (i1 + i2, j1 + j2, k1 + k2)
            out[key] = out.get(key, 0) + c1 * c2
    return TernaryForm(lhs.degree + rhs.degree, out)


def linear_span(coeffs: Iterable[Coeff], forms: Iterable[TernaryForm], degree: int) -> TernaryForm:
    """Sum c_m * v_m of equal-degree forms; tolerates empty input."""
    out: dict[Triple, Coeff] = {}
    for c, v in zip(coeffs, forms):
        if c == 0:
            continue
        if v.degree != degree:
            raise ValueError("degree mismatch in linear combination")
        for key, val in v.coeffs.items():
            out[key] = out.get(key, 0) + c * val
    return TernaryForm(degree, out)


def monomials(degree: int) -> list[Triple]:
    """All exponent triples of the given degree in canonical order."""
    out = [
        (i, j, degree - i - j)
        for i in range(degree, -1, -1)
        for j in range(degree - i, -1, -1)
    ]
    return sorted(out, reverse=True)


def coefficient_vector(v: TernaryForm) -> list[Coeff]:
    return [v[key] for key in monomials(v.degree)]


def form_from_vector(degree: int, vec) -> TernaryForm:
    keys = monomials(degree)
    if len(vec) != len(keys):
        raise ValueError("coefficient vector has wrong length")
    return TernaryForm(degree, dict(zip(keys, (_to_coeff(c) for c in vec))))


# ---------------------------------------------------------------------------
# 3x3 matrices and the signed permutation group


class Matrix3:
    """3x3 matrix with Fraction (exact) or float (numeric) entries."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(_to_coeff(e) for e in row) for row in rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("Matrix3 requires a 3x3 array")
        self.rows = rows

    @property
    def exact(self) -> bool:
        return all(isinstance(e, Fraction) for row in self.rows for e in row)

    def __getitem__(self, idx: tuple[int, int]) -> Coeff:
        return self.rows[idx[0]][idx[1]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix3):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Matrix3({[list(r) for r in self.rows]})"

    def __matmul__(self, other: "Matrix3") -> "Matrix3":
        return Matrix3(
            [
                [sum(self.rows[i][m] * other.rows[m][j] for m in range(3)) for j in range(3)]
                for i in range(3)
            ]
        )

    def transpose(self) -> "Matrix3":
        return Matrix3([[self.rows[j][i] for j in range(3)] for i in range(3)])

    def apply(self, vec):
        return tuple(sum(self.rows[i][j] * vec[j] for j in range(3)) for i in range(3))

    def max_abs(self) -> float:
        return max(abs(float(e)) for row in self.rows for e in row)

    def orthogonality_defect(self) -> float:
        gtg = self.transpose() @ self
        return max(
            abs(float(gtg.rows[i][j] - (1 if i == j else 0)))
            for i in range(3)
            for j in range(3)
        )

    def is_orthogonal(self) -> bool:
        if self.exact:
            gtg = self.transpose() @ self
            return gtg == identity_matrix()
        return self.orthogonality_defect() <= _NUMERIC_ORTHO_TOL

    def to_float(self) -> "Matrix3":
        return Matrix3([[float(e) for e in row] for row in self.rows])


def identity_matrix() -> Matrix3:
    return Matrix3([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def diagonal_matrix(a, b, c) -> Matrix3:
    return Matrix3([[a, 0, 0], [0, b, 0], [0, 0, c]])


def permutation_matrix(sigma: tuple[int, int, int]) -> Matrix3:
    """Matrix sending basis vector e_j to e_{sigma(j)}; sigma is 0-indexed."""
    if sorted(sigma) != [0, 1, 2]:
        raise ValueError("sigma must be a permutation of (0, 1, 2)")
    rows = [[0, 0, 0] for _ in range(3)]
    for j in range(3):
        rows[sigma[j]][j] = 1
    return Matrix3(rows)


def sign_change_matrix(tau: tuple[int, int, int]) -> Matrix3:
    if any(t not in (1, -1) for t in tau):
        raise ValueError("tau entries must be +-1")
    return diagonal_matrix(*tau)


def signed_permutation(sigma: tuple[int, int, int], tau: tuple[int, int, int]) -> Matrix3:
    """The product g_tau @ g_sigma (sign changes applied after permuting)."""
    return sign_change_matrix(tau) @ permutation_matrix(sigma)


def cyclic_matrix() -> Matrix3:
    """Permutation matrix of the 3-cycle x -> y -> z -> x."""
    return permutation_matrix((1, 2, 0))


def permutation_sign(sigma: tuple[int, int, int]) -> int:
    sign = 1
    s = list(sigma)
    for i in range(3):
        while s[i] != i:
            j = s[i]
            s[i], s[j] = s[j], s[i]
            sign = -sign
    return sign


ALL_PERMUTATIONS: tuple[tuple[int, int, int], ...] = (
    (0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0),
)

ALL_SIGN_CHOICES: tuple[tuple[int, int, int], ...] = tuple(
    (s0, s1, s2) for s0 in (1, -1) for s1 in (1, -1) for s2 in (1, -1)
)


def signed_permutation_group() -> list[tuple[tuple[int, int, int], tuple[int, int, int], Matrix3]]:
    """All 48 signed permutation matrices as (sigma, tau, matrix) triples."""
    return [
        (sigma, tau, signed_permutation(sigma, tau))
        for sigma in ALL_PERMUTATIONS
        for tau in ALL_SIGN_CHOICES
    ]


# ---------------------------------------------------------------------------
# Group action, apolar product, Laplacian, point evaluation


def act(g: Matrix3, v: TernaryForm) -> TernaryForm:
    """Substitution action: each variable is replaced by the matching column of g.

    Satisfies act(g1, act(g2, v)) == act(g1 @ g2, v).  Exact matrices must be
    orthogonal; numeric ones are trusted up to a small orthogonality defect
    since they come from our own eigensolver.
    """
    if g.exact and v.exact:
        if not g.is_orthogonal():
            raise ValueError("exact matrix is not orthogonal")
        rows = g.rows
    else:
        gf = g.to_float()
        if gf.orthogonality_defect() > _NUMERIC_ORTHO_TOL:
            raise ValueError("numeric matrix is not orthogonal within 1e-10")
        rows = gf.rows
        v = TernaryForm(v.degree, {key: float(c) for key, c in v.coeffs.items()})

    # Images of x, y, z as sparse linear forms.
    subs = []
    for var in range(3):
        lin = {}
        for row in range(3):
            e = rows[row][var]
            if e != 0:
                key = tuple(1 if m == row else 0 for m in range(3))
                lin[key] = e
        subs.append(lin)

    one = Fraction(1) if (g.exact and v.exact) else 1.0
    images: dict[Triple, dict[Triple, Coeff]] = {(0, 0, 0): {(0, 0, 0): one}}

    def image(key: Triple) -> dict[Triple, Coeff]:
        cached = images.get(key)
        if cached is not None:
            return cached
        var = 0 if key[0] else (1 if key[1] else 2)
        prev = list(key)
        prev[var] -= 1
        base = image(tuple(prev))
        lin = subs[var]
        out: dict[Triple, Coeff] = {}
        for mk, mc in base.items():
            for lk, lc in lin.items():
                nk = (mk[0] + lk[0], mk[1] + lk[1], mk[2] + lk[2])
                out[nk] = out.get(nk, 0) + mc * lc
        images[key] = out
        return out

    acc: dict[Triple, Coeff] = {}
    for key, c in v.coeffs.items():
        for mk, mc in image(key).items():
            acc[mk] = acc.get(mk, 0) + c * mc
    return TernaryForm(v.degree, acc)


def apolar(v: TernaryForm, w: TernaryForm) -> Coeff:
    """Apolar inner product: sum i! j! k! a_ijk b_ijk over shared monomials."""
    if v.degree != w.degree:
        raise ValueError(f"degree mismatch: {v.degree} vs {w.degree}")
    total: Coeff = Fraction(0)
    for key, a in v.coeffs.items():
        b = w.coeffs.get(key)
        if b is not None:
            i, j, k = key
            total += math.factorial(i) * math.factorial(j) * math.factorial(k) * a * b
    return total


def laplacian(v: TernaryForm) -> TernaryForm:
    if v.degree < 2:
        raise ValueError("laplacian requires degree >= 2")
    out: dict[Triple, Coeff] = {}
    for (i, j, k), c in v.coeffs.items():
        if i >= 2:
            key = (i - 2, j, k)
            out[key] = out.get(key, 0) + c * i * (i - 1)
        if j >= 2:
            key = (i, j - 2, k)
            out[key] = out.get(key, 0) + c * j * (j - 1)
        if k >= 2:
            key = (i, j, k - 2)
            out[key] = out.get(key, 0) + c * k * (k - 1)
    return TernaryForm(v.degree - 2, out)


def evaluate(v: TernaryForm, point: tuple[float, float, float]) -> float:
    x, y, z = (float(p) for p in point)
    total = 0.0
    for (i, j, k), c in v.coeffs.items():
        total += float(c) * x**i * y**j * z**k
    return total


# ---------------------------------------------------------------------------
# JSON serialization
#
# Schema: {"degree": <int>, "coefficients": {"i,j,k": "<num>/<den>", ...}}
# Exact coefficients are reduced rational strings ("/1" omitted); float
# coefficients are emitted as JSON numbers and parsed back as floats.


def _coeff_to_json(c: Coeff):
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return c


def form_to_json(v: TernaryForm) -> dict:
    return {
        "degree": v.degree,
        "coefficients": {
            f"{i},{j},{k}": _coeff_to_json(c) for (i, j, k), c in v.terms()
        },
    }


def form_from_json(data: dict) -> TernaryForm:
    degree = int(data["degree"])
    coeffs: dict[Triple, Coeff] = {}
    for key, val in data.get("coefficients", {}).items():
        i, j, k = (int(part) for part in key.split(","))
        coeffs[(i, j, k)] = float(val) if isinstance(val, float) else _to_coeff(val)
    return TernaryForm(degree, coeffs)


def load_form(path: str) -> TernaryForm:
    with open(path) as fh:
        return form_from_json(json.load(fh))


def save_form(v: TernaryForm, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(form_to_json(v), fh, indent=2)
        fh.write("\n")


def format_form(v: TernaryForm) -> str:
    """Human-readable rendering, canonical term order."""
    if v.is_zero():
        return "0"
    parts = []
    for (i, j, k), c in v.terms():
        mono = "".join(
            f"{name}^{e}" if e > 1 else name
            for name, e in (("x", i), ("y", j), ("z", k))
            if e
        )
        coeff = str(c)
        if mono:
            piece = mono if c == 1 else (f"-{mono}" if c == -1 else f"{coeff}*{mono}")
        else:
            piece = coeff
        parts.append(piece)
    text = " + ".join(parts)
    return text.replace("+ -", "- ")
