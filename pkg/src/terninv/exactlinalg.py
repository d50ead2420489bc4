"""Small dense exact linear algebra over Fraction.

Only what the base-change machinery needs: Gauss-Jordan inversion,
fraction-free (Bareiss) rank of integer matrices, and matrix-vector
products that work uniformly for Fraction and float entries.
Dimensions here are at most a few hundred, so plain row reduction
is entirely adequate.
"""

from __future__ import annotations

from fractions import Fraction


def invert(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse via Gauss-Jordan; raises on singular input."""
    n = len(matrix)
    aug = [[Fraction(e) for e in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [e * inv_p for e in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def rank(matrix: list[list[Fraction]]) -> int:
    """Rank by fraction-free elimination; denominators are cleared per row."""
    rows = []
    for row in matrix:
        fracs = [Fraction(e) for e in row]
        lcm = 1
        for f in fracs:
            if f.denominator != 1:
                g = _gcd(lcm, f.denominator)
                lcm = lcm // g * f.denominator
        rows.append([int(f * lcm) for f in fracs])
    m = len(rows)
    n = len(rows[0]) if m else 0
    r = 0
    prev = 1
    for col in range(n):
        pivot = next((i for i in range(r, m) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, m):
            for j in range(col + 1, n):
                rows[i][j] = (rows[r][col] * rows[i][j] - rows[i][col] * rows[r][j]) // prev
            rows[i][col] = 0
        prev = rows[r][col]
        r += 1
        if r == m:
            break
    return r


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def matvec(matrix, vec):
    return [sum(row[j] * vec[j] for j in range(len(vec))) for row in matrix]


def to_float_matrix(matrix) -> list[list[float]]:
    return [[float(e) for e in row] for row in matrix]
