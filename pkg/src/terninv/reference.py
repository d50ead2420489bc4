"""Integer-normalized reference families for harmonic degrees 4, 6 and 8.

These are the classical hand-normalized elements (r/s/t quartic family and
its degree-6/8 analogues).  The constructive generators in
:mod:`terninv.harmonic` fix a different normalization (the closed formula is
used verbatim), so each constructed element equals a rational multiple of the
reference element.  ``reference_scales`` recovers that per-element factor,
and the test suite pins the factors exactly.

Only the i = 1 member of each family is transcribed; the i = 2, 3 members are
its images under the cyclic variable rotation, which is also how the families
are defined.
"""

from __future__ import annotations

from fractions import Fraction

from .forms import TernaryForm
from .harmonic import cyclic_images, spanning_set

_QUARTIC_ROWS = (
    {(0, 4, 0): 1, (0, 2, 2): -6, (0, 0, 4): 1},            # r1 = y^4 - 6y^2z^2 + z^4
    {(0, 3, 1): 1, (0, 1, 3): -1},                          # s1 = y^3z - yz^3
    {(2, 1, 1): 6, (0, 3, 1): -1, (0, 1, 3): -1},           # t1 = 6x^2yz - y^3z - yz^3
)

_SEXTIC_ROWS = (
    {(6, 0, 0): -2, (0, 6, 0): -2, (0, 0, 6): -2,
     (4, 2, 0): 15, (0, 4, 2): 15, (2, 0, 4): 15,
     (4, 0, 2): 15, (2, 4, 0): 15, (0, 2, 4): 15, (2, 2, 2): -180},
    {(0, 6, 0): -1, (0, 4, 2): 15, (0, 2, 4): -15, (0, 0, 6): 1},
    {(0, 5, 1): 3, (0, 3, 3): -10, (0, 1, 5): 3},
    {(2, 3, 1): -10, (2, 1, 3): 10, (0, 5, 1): 1, (0, 1, 5): -1},
    {(4, 1, 1): 10, (2, 3, 1): -10, (2, 1, 3): -10, (0, 5, 1): 1, (0, 1, 5): 1},
)

_OCTIC_ROWS = (
    {(2, 6, 0): -14, (2, 4, 2): 210, (2, 2, 4): -210, (2, 0, 6): 14,
     (0, 8, 0): 1, (0, 6, 2): -14, (0, 2, 6): 14, (0, 0, 8): -1},
    {(0, 8, 0): 1, (0, 6, 2): -28, (0, 4, 4): 70, (0, 2, 6): -28, (0, 0, 8): 1},
    {(0, 7, 1): -1, (0, 5, 3): 7, (0, 3, 5): -7, (0, 1, 7): 1},
    {(2, 5, 1): 42, (2, 3, 3): -140, (2, 1, 5): 42,
     (0, 7, 1): -3, (0, 5, 3): 7, (0, 3, 5): 7, (0, 1, 7): -3},
    {(4, 3, 1): -35, (4, 1, 3): 35, (2, 5, 1): 21, (2, 1, 5): -21,
     (0, 7, 1): -1, (0, 1, 7): 1},
    {(6, 1, 1): 14, (4, 3, 1): -35, (4, 1, 3): -35, (2, 5, 1): 21, (2, 1, 5): 21,
     (0, 7, 1): -1, (0, 1, 7): -1},
)

_ROWS_BY_DEGREE = {4: _QUARTIC_ROWS, 6: _SEXTIC_ROWS, 8: _OCTIC_ROWS}


def reference_family(two_d: int) -> tuple[tuple[TernaryForm, ...], ...]:
    """Reference elements ref[i-1][j], shaped like the spanning family."""
    rows = _ROWS_BY_DEGREE.get(two_d)
    if rows is None:
        raise ValueError(f"no reference family for degree {two_d}")
    d = two_d // 2
    columns = []
    for j, data in enumerate(rows):
        base = TernaryForm(two_d, data)
        if d % 3 == 0 and j == 0:
            columns.append((base, base, base))  # the invariant element
        else:
            columns.append(cyclic_images(base))
    return tuple(tuple(columns[j][i] for j in range(len(rows))) for i in range(3))


def proportionality(v: TernaryForm, w: TernaryForm) -> Fraction | None:
    """Exact factor c with v == c * w, or None if the forms are not proportional."""
    if v.degree != w.degree or v.is_zero() != w.is_zero():
        return None
    if v.is_zero():
        return Fraction(0)
    if set(v.coeffs) != set(w.coeffs):
        return None
    items = iter(v.coeffs.items())
    key, val = next(items)
    ratio = Fraction(val) / Fraction(w.coeffs[key])
    for key, val in items:
        if Fraction(val) != ratio * Fraction(w.coeffs[key]):
            return None
    return ratio


def reference_scales(two_d: int) -> dict[tuple[int, int], Fraction]:
    """Per-element factor: constructed[i][j] == factor * reference[i][j]."""
    ref = reference_family(two_d)
    ss = spanning_set(two_d // 2)
    scales: dict[tuple[int, int], Fraction] = {}
    for i in (1, 2, 3):
        for j in range(ss.k):
            factor = proportionality(ss.element(i, j), ref[i - 1][j])
            if factor is None:
                raise AssertionError(f"element ({i},{j}) not proportional to reference")
            scales[(i, j)] = factor
    return scales
