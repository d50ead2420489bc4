"""Generating rational invariants of even-degree ternary forms.

On the slice the generators are polynomial: three symmetric functions of
the pivot-block coordinates a = (a1, a2, a3) -- sum of squares, product,
sum of fourth powers -- and, per remaining basis block j, the product of
the power matrix ((1,1,1),(a_i^2),(a_i^4)) with the twisted column
M[i][j] = a_i^xi(j) * delta^zeta(j) * alpha[i][j], where delta is the
alternating product (a1^2-a2^2)(a2^2-a3^2)(a3^2-a1^2).  When 3 | d the
invariant coordinate along the group-fixed basis element joins as p_inf.

Off the slice, evaluation composes the slice reduction with these
formulas; the values are invariant under the full orthogonal group since
the reduction rotation cancels.  Equal vectors (componentwise, relative
tolerance) characterize orthogonal equivalence of generic forms, and the
vector determines the form up to the group action, which the
reconstruction routine inverts.
"""

from __future__ import annotations

import enum
import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from . import exactlinalg
from .forms import (
    Coeff,
    TernaryForm,
    coefficient_vector,
    form_q,
    monomial,
    monomials,
    multiply,
)
from .harmonic import (
    SliceCoordinates,
    linear_combination,
    slice_basis,
    slice_coordinates,
)
from .reference import reference_family
from .slicing import DEFAULT_GAP_TOL, DegenerateForm, rotate_to_slice

_RECON_BOUNDARY = 1e-12


class RepeatedLambdaError(ValueError):
    """Quadratic-block coordinates coincide; the auxiliary system is undefined."""


class NoUnambiguousReconstruction(Exception):
    """The prescribed values admit no unambiguous preimage."""


def rel_close(x: float, y: float, tol: float) -> bool:
    """|x - y| <= tol * (1 + max(|x|, |y|)); the tolerance semantics used throughout."""
    return abs(x - y) <= tol * (1.0 + max(abs(x), abs(y)))


# ---------------------------------------------------------------------------
# Quadratic forms: characteristic-polynomial invariants


@dataclass(frozen=True)
class QuadraticInvariants:
    e1: Coeff
    e2: Coeff
    e3: Coeff

    def values(self) -> tuple[Coeff, Coeff, Coeff]:
        return (self.e1, self.e2, self.e3)


def quad_invariants(v2: TernaryForm) -> QuadraticInvariants:
    if v2.degree != 2:
        raise ValueError("quad_invariants requires a degree-2 form")
    a200, a020, a002 = v2[(2, 0, 0)], v2[(0, 2, 0)], v2[(0, 0, 2)]
    a110, a011, a101 = v2[(1, 1, 0)], v2[(0, 1, 1)], v2[(1, 0, 1)]
    e1 = a200 + a020 + a002
    e2 = 4 * (a020 * a200 + a002 * a020 + a002 * a200) - a110**2 - a101**2 - a011**2
    e3 = (4 * a002 * a020 * a200 + a101 * a110 * a011
          - a101**2 * a020 - a011**2 * a200 - a002 * a110**2)
    return QuadraticInvariants(e1, e2, e3)


# ---------------------------------------------------------------------------
# The generating invariants on the slice


@dataclass(frozen=True)
class InvariantVector:
    half_degree: int
    p0: tuple[Coeff, Coeff, Coeff]
    p: tuple[tuple[Coeff, ...], ...]   # p[i-1][j-1], j = 1..k_slice-1
    p_infinity: Coeff | None
    zeta: tuple[int, ...]              # signature echo pinning the j-labeling
    xi: tuple[int, ...]

    def values(self) -> list[Coeff]:
        flat = list(self.p0)
        for row in self.p:
            flat.extend(row)
        if self.p_infinity is not None:
            flat.append(self.p_infinity)
        return flat

    def __len__(self) -> int:
        return 3 + sum(len(row) for row in self.p) + (self.p_infinity is not None)


def invariant_count(d: int) -> int:
    return 2 * d * d + 3 * d - 2


def slice_invariants(coords: SliceCoordinates) -> InvariantVector:
    """Evaluate the generators on slice coordinates; exact on exact input."""
    d = coords.half_degree
    if d < 2:
        raise ValueError("slice_invariants requires half-degree >= 2")
    basis = slice_basis(d)
    sig = basis.signature
    a1, a2, a3 = coords.a
    sq = (a1 * a1, a2 * a2, a3 * a3)
    p0 = (sq[0] + sq[1] + sq[2], a1 * a2 * a3, sq[0] ** 2 + sq[1] ** 2 + sq[2] ** 2)
    delta = (sq[0] - sq[1]) * (sq[1] - sq[2]) * (sq[2] - sq[0])
    a = coords.a
    rows: list[list[Coeff]] = [[], [], []]
    for j in range(1, basis.k_slice):
        col = [
            (a[i] if sig.xi[j] else 1) * (delta if sig.zeta[j] else 1) * coords.alpha[i][j - 1]
            for i in range(3)
        ]
        rows[0].append(col[0] + col[1] + col[2])
        rows[1].append(sq[0] * col[0] + sq[1] * col[1] + sq[2] * col[2])
        rows[2].append(sq[0] ** 2 * col[0] + sq[1] ** 2 * col[1] + sq[2] ** 2 * col[2])
    p_inf = coords.alpha_infinity if basis.w_infinity is not None else None
    return InvariantVector(
        d, p0, tuple(tuple(r) for r in rows), p_inf, sig.zeta, sig.xi
    )


def evaluate_invariants(v: TernaryForm, tol: float = DEFAULT_GAP_TOL) -> InvariantVector:
    """Full evaluation pipeline; raises DegenerateForm off the generic locus."""
    coords, _ = rotate_to_slice(v, tol)
    return slice_invariants(coords)


class Verdict(enum.Enum):
    EQUIVALENT = "equivalent"
    DISTINCT = "distinct"
    UNDECIDED = "undecided"


def equivalent(v: TernaryForm, w: TernaryForm, tol: float = DEFAULT_GAP_TOL) -> Verdict:
    """Decide orthogonal equivalence by comparing invariant vectors.

    Values agreeing within tol everywhere give EQUIVALENT; a disagreement
    beyond 10*tol gives DISTINCT; anything else (including degenerate
    inputs) is UNDECIDED.
    """
    if v.degree != w.degree:
        raise ValueError("equivalent requires forms of equal degree")
    if v.degree % 2:
        raise ValueError("equivalent requires even degree")
    if v.degree == 2:
        left = [float(x) for x in quad_invariants(v).values()]
        right = [float(x) for x in quad_invariants(w).values()]
    else:
        try:
            left = [float(x) for x in evaluate_invariants(v, tol).values()]
            right = [float(x) for x in evaluate_invariants(w, tol).values()]
        except DegenerateForm:
            return Verdict.UNDECIDED
    if all(rel_close(x, y, tol) for x, y in zip(left, right)):
        return Verdict.EQUIVALENT
    if any(not rel_close(x, y, 10 * tol) for x, y in zip(left, right)):
        return Verdict.DISTINCT
    return Verdict.UNDECIDED


# ---------------------------------------------------------------------------
# Quartic auxiliary system (restricts to the quadratic invariants)


@dataclass(frozen=True)
class QuarticAuxInvariants:
    lam: tuple[Coeff, Coeff, Coeff]   # power sums of the quadratic block
    r: tuple[Coeff, Coeff, Coeff]
    s: tuple[Coeff, Coeff, Coeff]
    t0: Coeff
    t: tuple[Coeff, Coeff, Coeff]

    def values(self) -> list[Coeff]:
        return [*self.lam, *self.r, *self.s, self.t0, *self.t]


_printed_lock = threading.Lock()
_printed_inverse: list[list[Fraction]] | None = None
_printed_float_inverse: list[list[float]] | None = None


def _printed_quartic_inverse():
    # Base change from monomials to the integer-normalized quartic family
    # (lambda, r, s, t order) completed by the off-diagonal quadratic slots.
    global _printed_inverse, _printed_float_inverse
    with _printed_lock:
        if _printed_inverse is None:
            q = form_q()
            ref = reference_family(4)
            columns = [multiply(q, monomial(*e, 1)) for e in ((2, 0, 0), (0, 2, 0), (0, 0, 2))]
            for j in range(3):
                columns.extend(ref[i][j] for i in range(3))
            columns.extend(multiply(q, monomial(*e, 1)) for e in ((1, 1, 0), (0, 1, 1), (1, 0, 1)))
            vecs = [coefficient_vector(c) for c in columns]
            n = len(monomials(4))
            matrix = [[vecs[c][r] for c in range(n)] for r in range(n)]
            _printed_inverse = exactlinalg.invert(matrix)
            _printed_float_inverse = exactlinalg.to_float_matrix(_printed_inverse)
        return _printed_inverse, _printed_float_inverse


def quartic_printed_coordinates(coords: SliceCoordinates):
    """(lambda, r, s, t) of a quartic slice element in the integer-normalized family."""
    if coords.half_degree != 2:
        raise ValueError("quartic coordinates require half-degree 2")
    v = linear_combination(slice_basis(2), coords)
    inverse, float_inverse = _printed_quartic_inverse()
    vec = coefficient_vector(v)
    if v.exact:
        out = exactlinalg.matvec(inverse, vec)
    else:
        out = exactlinalg.matvec(float_inverse, [float(c) for c in vec])
    lam, r, s, t = out[0:3], out[3:6], out[6:9], out[9:12]
    return tuple(lam), tuple(r), tuple(s), tuple(t)


def _inverse_3x3(rows):
    # Adjugate inverse; generic over Fraction/float entries.
    (a, b, c), (d, e, f), (g, h, i) = rows
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det == 0:
        raise ZeroDivisionError("singular 3x3 matrix")
    adj = (
        (e * i - f * h, c * h - b * i, b * f - c * e),
        (f * g - d * i, a * i - c * g, c * d - a * f),
        (d * h - e * g, b * g - a * h, a * e - b * d),
    )
    if isinstance(det, Fraction):
        return tuple(tuple(x / det for x in row) for row in adj)
    return tuple(tuple(x / float(det) for x in row) for row in adj)


def quartic_aux_from_printed(lam, r, s, t) -> QuarticAuxInvariants:
    """The 13 auxiliary values from integer-normalized quartic coordinates."""
    l1, l2, l3 = lam
    bracket = (l1 - l2) * (l2 - l3) * (l3 - l1)
    if bracket == 0:
        raise RepeatedLambdaError("repeated quadratic-block coordinate")
    lam_sums = (l1 + l2 + l3, l1**2 + l2**2 + l3**2, l1**3 + l2**3 + l3**3)
    t0 = t[0] * t[1] * t[2]
    vand_inv = _inverse_3x3(((1, l1, l1 * l1), (1, l2, l2 * l2), (1, l3, l3 * l3)))
    cols = [
        (r[0], r[1], r[2]),
        (s[0] * t[0] * bracket, s[1] * t[1] * bracket, s[2] * t[2] * bracket),
        (t[0] ** 2, t[1] ** 2, t[2] ** 2),
    ]
    solved = [
        tuple(sum(vand_inv[i][m] * col[m] for m in range(3)) for i in range(3))
        for col in cols
    ]
    return QuarticAuxInvariants(lam_sums, solved[0], solved[1], t0, solved[2])


def quartic_aux_invariants(coords: SliceCoordinates) -> QuarticAuxInvariants:
    lam, r, s, t = quartic_printed_coordinates(coords)
    return quartic_aux_from_printed(lam, r, s, t)


def equivariant_matrices(coords: SliceCoordinates):
    """The four equivariant maps of the quartic construction (test support).

    E1, E2 are the power matrices of the quadratic-block and t-block
    coordinates; E3, E4 the twisted s*t columns with the respective
    alternating determinants.
    """
    lam, r, s, t = quartic_printed_coordinates(coords)
    e1 = tuple((1, l, l * l) for l in lam)
    e2 = tuple((1, x * x, x**4) for x in t)
    det1 = (lam[0] - lam[1]) * (lam[1] - lam[2]) * (lam[2] - lam[0])
    det2 = ((t[0] ** 2 - t[1] ** 2) * (t[1] ** 2 - t[2] ** 2) * (t[2] ** 2 - t[0] ** 2))
    e3 = tuple(s[i] * t[i] * det1 for i in range(3))
    e4 = tuple(s[i] * t[i] * det2 for i in range(3))
    return e1, e2, e3, e4


# ---------------------------------------------------------------------------
# Reconstruction


def _cubic_three_positive_roots(a: float, b: float, c: float) -> tuple[float, float, float]:
    # Trigonometric solution of T^3 - aT^2 + bT - c with three distinct real
    # roots (caller guarantees a positive discriminant), descending order,
    # one Newton polish per root.
    p = b - a * a / 3.0
    q = -c + a * b / 3.0 - 2.0 * a**3 / 27.0
    assert p < 0.0, "three distinct real roots require negative depressed coefficient"
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    theta = math.acos(arg)
    roots = sorted(
        (m * math.cos((theta - 2.0 * math.pi * k) / 3.0) + a / 3.0 for k in range(3)),
        reverse=True,
    )

    def f(x: float) -> float:
        return ((x - a) * x + b) * x - c

    def fp(x: float) -> float:
        return (3.0 * x - 2.0 * a) * x + b

    polished = []
    for root in roots:
        slope = fp(root)
        if slope != 0.0:
            root -= f(root) / slope
        scale = 1.0 + abs(root) ** 3 + abs(a) * root * root + abs(b) * abs(root) + abs(c)
        assert abs(f(root)) <= 1e-12 * scale, "cubic residual too large"
        polished.append(root)
    return tuple(polished)


def reconstruct(mu: InvariantVector) -> TernaryForm:
    """Build a slice form whose invariant vector equals mu (Algorithm 3).

    Raises NoUnambiguousReconstruction when the prescribed first three
    values fail the positivity/discriminant test that guarantees three
    distinct positive squares for the pivot coordinates.
    """
    d = mu.half_degree
    basis = slice_basis(d)
    if len(mu.p) != 3 or any(len(row) != basis.k_slice - 1 for row in mu.p):
        raise ValueError("invariant vector shape does not match the slice basis")
    if (mu.p_infinity is not None) != (basis.w_infinity is not None):
        raise ValueError("p_infinity presence does not match the degree")

    mu10, mu20, mu30 = (float(x) for x in mu.p0)
    a_c = mu10
    b_c = (mu10 * mu10 - mu30) / 2.0
    c_c = mu20 * mu20
    disc = (a_c**2 * b_c**2 - 4.0 * b_c**3 - 4.0 * a_c**3 * c_c
            - 27.0 * c_c**2 + 18.0 * a_c * b_c * c_c)
    disc_scale = (1.0 + abs(a_c**2 * b_c**2) + abs(4.0 * b_c**3)
                  + abs(4.0 * a_c**3 * c_c) + 27.0 * c_c**2 + abs(18.0 * a_c * b_c * c_c))
    if not (a_c > 0.0 and b_c > 0.0 and c_c > 0.0 and disc > _RECON_BOUNDARY * disc_scale):
        raise NoUnambiguousReconstruction(
            "the prescribed values allow no unambiguous reconstruction")

    r1, r2, r3 = _cubic_three_positive_roots(a_c, b_c, c_c)
    assert r3 > 0.0
    a_vals = [math.sqrt(r) for r in (r1, r2, r3)]
    if mu20 < 0.0:
        a_vals[0] = -a_vals[0]

    vand_inv = _inverse_3x3(((1.0, 1.0, 1.0), (r1, r2, r3), (r1 * r1, r2 * r2, r3 * r3)))
    delta_r = (r1 - r2) * (r2 - r3) * (r3 - r1)
    alpha_rows: list[list[float]] = [[], [], []]
    for j in range(1, basis.k_slice):
        col = [float(mu.p[i][j - 1]) for i in range(3)]
        m_col = [sum(vand_inv[i][m] * col[m] for m in range(3)) for i in range(3)]
        for i in range(3):
            denom = (a_vals[i] if basis.signature.xi[j] else 1.0) * (
                delta_r if basis.signature.zeta[j] else 1.0)
            alpha_rows[i].append(m_col[i] / denom)
    coords = SliceCoordinates(
        d,
        tuple(a_vals),
        tuple(tuple(row) for row in alpha_rows),
        float(mu.p_infinity) if mu.p_infinity is not None else None,
    )
    return linear_combination(basis, coords)


# ---------------------------------------------------------------------------
# JSON
#
# Schema: {"d": <int>, "p0": [x, x, x], "p": [[...], [...], [...]],
#          "p_inf": <opt>, "ordering": {"zeta": [...], "xi": [...]}}
# Exact values are rational strings, floats plain numbers.


def _value_to_json(x: Coeff):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def _value_from_json(x):
    return float(x) if isinstance(x, float) else Fraction(x)


def invariants_to_json(vec: InvariantVector) -> dict:
    data = {
        "d": vec.half_degree,
        "p0": [_value_to_json(x) for x in vec.p0],
        "p": [[_value_to_json(x) for x in row] for row in vec.p],
        "ordering": {"zeta": list(vec.zeta), "xi": list(vec.xi)},
    }
    if vec.p_infinity is not None:
        data["p_inf"] = _value_to_json(vec.p_infinity)
    return data


def invariants_from_json(data: dict) -> InvariantVector:
    d = int(data["d"])
    sig = slice_basis(d).signature
    ordering = data.get("ordering")
    if ordering is not None:
        if tuple(ordering["zeta"]) != sig.zeta or tuple(ordering["xi"]) != sig.xi:
            raise ValueError("invariant vector ordering does not match this build")
    return InvariantVector(
        d,
        tuple(_value_from_json(x) for x in data["p0"]),
        tuple(tuple(_value_from_json(x) for x in row) for row in data["p"]),
        _value_from_json(data["p_inf"]) if "p_inf" in data else None,
        sig.zeta,
        sig.xi,
    )


def load_invariants(path: str) -> InvariantVector:
    with open(path) as fh:
        return invariants_from_json(json.load(fh))


def save_invariants(vec: InvariantVector, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(invariants_to_json(vec), fh, indent=2)
        fh.write("\n")
