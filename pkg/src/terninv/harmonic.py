"""Harmonic polynomial spaces with signed-permutation symmetry.

For each half-degree d >= 2 this module constructs:

* the even/odd harmonic generators Vg_l / Vf_l from closed-formula
  coefficients (unique up to scale, pinned by the formula - no rescaling);
* the equivariant spanning family u[i][j] of the harmonic space H_{2d},
  transforming under the 48 signed permutations by the recorded
  (zeta, xi) characters, with the linear relation dictated by d mod 3;
* the equivariant basis w[i][j] (plus an invariant element w_inf when
  3 | d) of the slice: the subspace of degree-2d forms whose quadratic
  component has a diagonal matrix;
* exact base-change machinery for harmonic decomposition and for slice
  coordinates, cached per degree behind a lock.

Block ordering of the slice basis is canonical: blocks sorted by
descending harmonic degree, within a source family by ascending family
index, the pure quadratic block last; then the single lowest-ordered
block with characters (zeta, xi) = (0, 1) is moved to position j = 0.
The invariant formulas in :mod:`terninv.invariants` rely on the pivot
block's sign-change character, so consumers must read the emitted
(zeta, xi) arrays rather than assume an ordering.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from . import exactlinalg
from .forms import (
    Coeff,
    TernaryForm,
    act,
    coefficient_vector,
    cyclic_matrix,
    form_q,
    linear_span,
    monomial,
    monomials,
    multiply,
    scale,
    sub,
)


class NotInSliceError(ValueError):
    """Raised when a form's quadratic component has off-diagonal entries."""


def signed_binomial(a: int, b: int) -> int:
    """binom(a, b) = a(a-1)...(a-b+1)/b! for b >= 0, else 0; a may be negative."""
    if b < 0:
        return 0
    num = 1
    for m in range(b):
        num *= a - m
    return num // math.factorial(b)


def _multinomial(n: int, i: int, j: int, k: int) -> int:
    return math.factorial(n) // (math.factorial(i) * math.factorial(j) * math.factorial(k))


def _beta(n: int, l: int, i: int, j: int) -> int:
    # Solution of the harmonicity recursion for exponent row (i, j, n-i-j)
    # with x-cap l: one binomial when n - l is odd, a two-term sum when even.
    if (n - l) % 2 == 1:
        s = (n - l + 1) // 2
        val = signed_binomial(j - s, l - i)
    else:
        s = (n - l) // 2
        val = signed_binomial(j - s, l - i) + signed_binomial(j - s - 1, l - i)
    return -val if j % 2 else val


def even_generator(d: int, l: int) -> TernaryForm:
    """Harmonic form of degree 2d, all exponents even, x-degree exactly 2l."""
    if d < 2 or not 0 <= l <= d:
        raise ValueError(f"even_generator requires d >= 2 and 0 <= l <= d, got ({d}, {l})")
    coeffs = {}
    for i in range(l + 1):
        for j in range(d - i + 1):
            k = d - i - j
            b = _beta(d, l, i, j)
            if b:
                coeffs[(2 * i, 2 * j, 2 * k)] = Fraction(b * _multinomial(2 * d, 2 * i, 2 * j, 2 * k))
    return TernaryForm(2 * d, coeffs)


def odd_generator(d: int, l: int) -> TernaryForm:
    """Harmonic form of degree 2d, x-degree even (max 2l), y and z degrees odd."""
    if d < 2 or not 0 <= l <= d - 1:
        raise ValueError(f"odd_generator requires d >= 2 and 0 <= l <= d-1, got ({d}, {l})")
    n = d - 1
    coeffs = {}
    for i in range(l + 1):
        for j in range(n - i + 1):
            k = n - i - j
            b = _beta(n, l, i, j)
            if b:
                coeffs[(2 * i, 2 * j + 1, 2 * k + 1)] = Fraction(
                    b * _multinomial(2 * d, 2 * i, 2 * j + 1, 2 * k + 1)
                )
    return TernaryForm(2 * d, coeffs)


def cyclic_images(v: TernaryForm) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
    """(v, c v, c^2 v) for the cyclic variable rotation x -> y -> z -> x."""
    gc = cyclic_matrix()
    first = act(gc, v)
    return v, first, act(gc, first)


# ---------------------------------------------------------------------------
# Equivariant spanning sets of H_{2d}


@dataclass(frozen=True)
class EquivariantSignature:
    zeta: tuple[int, ...]
    xi: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.zeta)


@dataclass(frozen=True)
class EquivariantSpanningSet:
    half_degree: int
    k: int
    k0: int
    elements: tuple[tuple[TernaryForm, ...], ...]  # elements[i-1][j]
    signature: EquivariantSignature
    relation: str  # "none" (d%3==2), "sum" (d%3==1), "equal" (d%3==0)

    def element(self, i: int, j: int) -> TernaryForm:
        return self.elements[i - 1][j]

    def independent(self) -> list[tuple[int, int, TernaryForm]]:
        """(i, j, form) triples with the dependent j=0 members dropped."""
        out = []
        for j in range(self.k):
            for i in (1, 2, 3):
                if j == 0:
                    if self.relation == "sum" and i == 3:
                        continue
                    if self.relation == "equal" and i != 1:
                        continue
                out.append((i, j, self.element(i, j)))
        return out


# Reentrant: building one cache may consult another (slice basis pulls in
# spanning sets of lower degree).
_lock = threading.RLock()
_span_cache: dict[int, EquivariantSpanningSet] = {}
_slice_cache: dict[int, "SliceBasis"] = {}
_decomp_cache: dict[int, "_DecompData"] = {}
_coord_cache: dict[int, "_CoordData"] = {}


def spanning_set(d: int) -> EquivariantSpanningSet:
    if d < 2:
        raise ValueError("spanning_set requires d >= 2")
    with _lock:
        cached = _span_cache.get(d)
        if cached is None:
            cached = _build_spanning_set(d)
            _span_cache[d] = cached
        return cached


def _build_spanning_set(d: int) -> EquivariantSpanningSet:
    k0 = d // 3  # == ceil((d-2)/3) for d >= 2
    k = k0 + d + 1
    columns: list[tuple[TernaryForm, TernaryForm, TernaryForm]] = []
    top = even_generator(d, k0)
    if d % 3 == 0:
        images = cyclic_images(top)
        invariant = linear_span((1, 1, 1), images, 2 * d)
        columns.append((invariant, invariant, invariant))
    else:
        columns.append(cyclic_images(top))
    for j in range(1, k):
        gen = even_generator(d, k0 - j) if j <= k0 else odd_generator(d, j - k0 - 1)
        columns.append(cyclic_images(gen))
    zeta = tuple((d + k0 + j) % 2 for j in range(k))
    xi = tuple(1 if j > k0 else 0 for j in range(k))
    relation = {2: "none", 1: "sum", 0: "equal"}[d % 3]
    elements = tuple(tuple(columns[j][i] for j in range(k)) for i in range(3))
    return EquivariantSpanningSet(
        half_degree=d,
        k=k,
        k0=k0,
        elements=elements,
        signature=EquivariantSignature(zeta, xi),
        relation=relation,
    )


def harmonic_dimension(d: int) -> int:
    return 4 * d + 1


# ---------------------------------------------------------------------------
# Representation multiplicities


def rep_multiplicities(d: int) -> dict[str, int]:
    """Tally of block types in the spanning family of H_{2d}."""
    ss = spanning_set(d)
    counts = {"W00": 0, "W10": 0, "W01": 0, "W11": 0, "Wtriv": 0, "Wstd": 0}
    start = 0
    if ss.relation == "equal":
        counts["Wtriv"] = 1
        start = 1
    elif ss.relation == "sum":
        counts["Wstd"] = 1
        start = 1
    for j in range(start, ss.k):
        counts[f"W{ss.signature.zeta[j]}{ss.signature.xi[j]}"] += 1
    return counts


def rep_multiplicities_closed_form(d: int) -> dict[str, int]:
    """Case formulas for the multiplicities, by d mod 3."""
    ceil = lambda a, b: -(-a // b)
    if d % 3 == 2:
        return {
            "W00": ceil(d + 1, 6), "W10": (d + 1) // 6,
            "W01": ceil(d, 2), "W11": d // 2,
            "Wtriv": 0, "Wstd": 0,
        }
    if d % 3 == 1:
        return {
            "W00": ceil(d - 1, 6), "W10": (d - 1) // 6,
            "W01": ceil(d, 2), "W11": d // 2,
            "Wtriv": 0, "Wstd": 1,
        }
    return {
        "W00": d // 6, "W10": ceil(d, 6),
        "W01": ceil(d, 2), "W11": d // 2,
        "Wtriv": 1, "Wstd": 0,
    }


# ---------------------------------------------------------------------------
# Slice basis


@dataclass(frozen=True)
class SliceBlock:
    zeta: int
    xi: int
    forms: tuple[TernaryForm, TernaryForm, TernaryForm]
    label: str


@dataclass(frozen=True)
class SliceBasis:
    half_degree: int
    k_slice: int
    blocks: tuple[SliceBlock, ...]
    w_infinity: TernaryForm | None
    signature: EquivariantSignature

    def w(self, i: int, j: int) -> TernaryForm:
        return self.blocks[j].forms[i - 1]


def slice_dimension(d: int) -> int:
    return (2 * d + 2) * (2 * d + 1) // 2 - 3


def slice_basis(d: int) -> SliceBasis:
    if d < 1:
        raise ValueError("slice_basis requires d >= 1")
    with _lock:
        cached = _slice_cache.get(d)
        if cached is None:
            cached = _build_slice_basis(d)
            _slice_cache[d] = cached
        return cached


def _q_power(p: int) -> TernaryForm:
    out = monomial(0, 0, 0, 1)
    q = form_q()
    for _ in range(p):
        out = multiply(out, q)
    return out


def _build_slice_basis(d: int) -> SliceBasis:
    quad_block = SliceBlock(
        0, 0,
        tuple(multiply(_q_power(d - 1), monomial(*exps, 1))
              for exps in ((2, 0, 0), (0, 2, 0), (0, 0, 2))),
        "quad",
    )
    if d == 1:
        # Degenerate case: just x^2, y^2, z^2; empty signature arrays.
        return SliceBasis(1, 1, (quad_block,), None, EquivariantSignature((), ()))

    blocks: list[SliceBlock] = []
    w_inf: TernaryForm | None = None
    e = d
    while e >= 2:
        u = spanning_set(e)
        mult = _q_power(d - e)
        sig = u.signature

        def raised(forms_triple, power_form):
            return tuple(multiply(power_form, f) for f in forms_triple)

        def column(src, j):
            return tuple(src.element(i, j) for i in (1, 2, 3))

        if e % 3 == 2:
            for j in range(u.k):
                blocks.append(SliceBlock(sig.zeta[j], sig.xi[j],
                                         raised(column(u, j), mult), f"deg{2 * e}.j{j}"))
            e -= 1
        elif e % 3 == 1:
            lower = spanning_set(e - 1)
            q_inv = multiply(form_q(), lower.element(1, 0))
            # Merged block spanning  q * (invariant of H_{2e-2})  +  the j=0
            # plane of H_{2e}.  The zero-sum family carries the sign-of-
            # permutation twist, so the plain sum of the two printed pieces is
            # not equivariant; the cyclic differences u[i+1] - u[i+2] restore
            # the untwisted permutation action, giving a (0, 0) block.
            u0 = [u.element(i, 0) for i in (1, 2, 3)]
            merged = tuple(
                linear_span((1, 1, -1), (q_inv, u0[(i + 1) % 3], u0[(i + 2) % 3]), 2 * e)
                for i in range(3)
            )
            blocks.append(SliceBlock(0, 0, raised(merged, mult), f"merge{2 * e}.j0"))
            for j in range(1, u.k):
                blocks.append(SliceBlock(sig.zeta[j], sig.xi[j],
                                         raised(column(u, j), mult), f"deg{2 * e}.j{j}"))
            lsig = lower.signature
            lmult = _q_power(d - e + 1)
            for j in range(1, lower.k):
                blocks.append(SliceBlock(lsig.zeta[j], lsig.xi[j],
                                         raised(column(lower, j), lmult), f"deg{2 * (e - 1)}.j{j}"))
            e -= 2
        else:
            # e % 3 == 0 is reachable only at the top (lower multiples of 3
            # are consumed by the merge one degree above).
            assert e == d
            w_inf = u.element(1, 0)
            for j in range(1, u.k):
                blocks.append(SliceBlock(sig.zeta[j], sig.xi[j],
                                         raised(column(u, j), mult), f"deg{2 * e}.j{j}"))
            e -= 1

    blocks.append(quad_block)
    pivot = next(idx for idx, b in enumerate(blocks) if (b.zeta, b.xi) == (0, 1))
    blocks.insert(0, blocks.pop(pivot))

    k = len(blocks)
    expected = (d + 1) * (2 * d + 1) // 3 - 1
    assert k == expected, f"slice block count {k} != {expected}"
    signature = EquivariantSignature(
        tuple(b.zeta for b in blocks), tuple(b.xi for b in blocks)
    )
    return SliceBasis(d, k, tuple(blocks), w_inf, signature)


# ---------------------------------------------------------------------------
# Harmonic decomposition


@dataclass(frozen=True)
class HarmonicComponents:
    half_degree: int
    harmonics: tuple[TernaryForm, ...]  # degrees 2d, 2d-2, ..., 4
    quadratic_part: TernaryForm

    def harmonic(self, two_e: int) -> TernaryForm:
        return self.harmonics[(2 * self.half_degree - two_e) // 2]


@dataclass
class _DecompData:
    groups: list[tuple[int, list[TernaryForm]]]  # (e, raw u forms), column order
    inverse: list[list[Fraction]]
    float_inverse: list[list[float]]


def _decomp_data(d: int) -> _DecompData:
    with _lock:
        cached = _decomp_cache.get(d)
        if cached is None:
            cached = _build_decomp_data(d)
            _decomp_cache[d] = cached
        return cached


def _build_decomp_data(d: int) -> _DecompData:
    columns: list[list[Fraction]] = []
    groups: list[tuple[int, list[TernaryForm]]] = []
    for e in range(d, 1, -1):
        mult = _q_power(d - e)
        raws = [f for _, _, f in spanning_set(e).independent()]
        groups.append((e, raws))
        columns.extend(coefficient_vector(multiply(mult, f)) for f in raws)
    qd1 = _q_power(d - 1)
    for exps in ((2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (0, 1, 1), (1, 0, 1)):
        columns.append(coefficient_vector(multiply(qd1, monomial(*exps, 1))))
    n = len(monomials(2 * d))
    assert len(columns) == n
    matrix = [[columns[c][r] for c in range(n)] for r in range(n)]
    inverse = exactlinalg.invert(matrix)
    return _DecompData(groups, inverse, exactlinalg.to_float_matrix(inverse))


def harmonic_decompose(v: TernaryForm) -> HarmonicComponents:
    """Split v = h_{2d} + q h_{2d-2} + ... + q^{d-2} h_4 + q^{d-1} v'."""
    if v.degree % 2 or v.degree < 2:
        raise ValueError("harmonic_decompose requires even degree >= 2")
    d = v.degree // 2
    if d == 1:
        return HarmonicComponents(1, (), v)
    data = _decomp_data(d)
    vec = coefficient_vector(v)
    if v.exact:
        coords = exactlinalg.matvec(data.inverse, vec)
    else:
        coords = exactlinalg.matvec(data.float_inverse, [float(c) for c in vec])
    harmonics = []
    pos = 0
    for e, raws in data.groups:
        block = coords[pos:pos + len(raws)]
        pos += len(raws)
        harmonics.append(linear_span(block, raws, 2 * e))
    b200, b020, b002, b110, b011, b101 = coords[pos:pos + 6]
    vprime = TernaryForm(2, {
        (2, 0, 0): b200, (0, 2, 0): b020, (0, 0, 2): b002,
        (1, 1, 0): b110, (0, 1, 1): b011, (1, 0, 1): b101,
    })
    return HarmonicComponents(d, tuple(harmonics), vprime)


def reassemble(components: HarmonicComponents) -> TernaryForm:
    d = components.half_degree
    total = multiply(_q_power(d - 1), components.quadratic_part)
    for idx, h in enumerate(components.harmonics):
        total = _add_forms(total, multiply(_q_power(idx), h))
    return total


def _add_forms(a: TernaryForm, b: TernaryForm) -> TernaryForm:
    return linear_span((1, 1), (a, b), a.degree)


# ---------------------------------------------------------------------------
# Slice coordinates


@dataclass(frozen=True)
class SliceCoordinates:
    half_degree: int
    a: tuple[Coeff, Coeff, Coeff]
    alpha: tuple[tuple[Coeff, ...], ...]  # alpha[i-1][j-1], j = 1..k_slice-1
    alpha_infinity: Coeff | None

    def block(self, j: int) -> tuple[Coeff, Coeff, Coeff]:
        if j == 0:
            return self.a
        return tuple(self.alpha[i][j - 1] for i in range(3))


@dataclass
class _CoordData:
    basis: SliceBasis
    inverse: list[list[Fraction]]
    float_inverse: list[list[float]]


_FLOAT_RESIDUAL_BOUND = 1e-8


def _coord_data(d: int) -> _CoordData:
    with _lock:
        cached = _coord_cache.get(d)
        if cached is None:
            cached = _build_coord_data(d)
            _coord_cache[d] = cached
        return cached


def _build_coord_data(d: int) -> _CoordData:
    basis = slice_basis(d)
    columns: list[list[Fraction]] = []
    for block in basis.blocks:
        columns.extend(coefficient_vector(f) for f in block.forms)
    if basis.w_infinity is not None:
        columns.append(coefficient_vector(basis.w_infinity))
    qd1 = _q_power(d - 1)
    for exps in ((1, 1, 0), (0, 1, 1), (1, 0, 1)):
        columns.append(coefficient_vector(multiply(qd1, monomial(*exps, 1))))
    n = len(monomials(2 * d))
    assert len(columns) == n
    matrix = [[columns[c][r] for c in range(n)] for r in range(n)]
    inverse = exactlinalg.invert(matrix)
    return _CoordData(basis, inverse, exactlinalg.to_float_matrix(inverse))


def slice_coordinates(v: TernaryForm) -> SliceCoordinates:
    """Coordinates of v in the slice basis; rejects off-diagonal quadratic parts."""
    if v.degree % 2 or v.degree < 2:
        raise ValueError("slice_coordinates requires even degree >= 2")
    d = v.degree // 2
    data = _coord_data(d)
    vec = coefficient_vector(v)
    exact = v.exact
    if exact:
        coords = exactlinalg.matvec(data.inverse, vec)
    else:
        coords = exactlinalg.matvec(data.float_inverse, [float(c) for c in vec])
    offdiag = coords[-3:]
    if exact:
        if any(c != 0 for c in offdiag):
            raise NotInSliceError("quadratic part has off-diagonal entries")
    else:
        bound = _FLOAT_RESIDUAL_BOUND * (1.0 + max((abs(float(c)) for c in vec), default=0.0))
        worst = max(abs(c) for c in offdiag)
        if worst > bound:
            raise NotInSliceError(
                f"off-diagonal quadratic residual {worst:.3e} exceeds bound {bound:.3e}"
            )
    k = data.basis.k_slice
    body = coords[: 3 * k]
    a = (body[0], body[1], body[2])
    alpha = tuple(
        tuple(body[3 * j + i] for j in range(1, k)) for i in range(3)
    )
    alpha_inf = coords[3 * k] if data.basis.w_infinity is not None else None
    return SliceCoordinates(d, a, alpha, alpha_inf)


def linear_combination(basis: SliceBasis, coords: SliceCoordinates) -> TernaryForm:
    """Reassemble a slice form from its coordinates."""
    if basis.half_degree != coords.half_degree:
        raise ValueError("basis/coordinate degree mismatch")
    degree = 2 * basis.half_degree
    parts: list[Coeff] = []
    forms: list[TernaryForm] = []
    for j, block in enumerate(basis.blocks):
        vals = coords.block(j)
        for i in range(3):
            parts.append(vals[i])
            forms.append(block.forms[i])
    if basis.w_infinity is not None:
        parts.append(coords.alpha_infinity if coords.alpha_infinity is not None else 0)
        forms.append(basis.w_infinity)
    return linear_span(parts, forms, degree)
