"""Rewriting invariants as rational expressions in the generators.

Expressions live in the fraction field over a fixed symbol set: slice
coordinates (a1..a3, al[i][j], ainf) ranked above generator symbols
(P[i][j], Pinf).  Rewriting eliminates coordinate symbols by substitution
rules whose denominators are pure generator polynomials, so a polynomial
input turns into numerator/denominator pairs with generator-only
denominators; numerator and denominator of a rational input are rewritten
independently.  Any surviving coordinate symbol after the fixpoint means
the input was not an invariant.

Rule order for the minimal system: the alpha columns first (one pass,
via the inverse power matrix), then a1 (one pass), then the a2^4 and a3^6
monomial reductions to fixpoint.  The quartic auxiliary system follows the
same scheme with its own symbols (lam, r, s and the pivot coordinates) and
only ever introduces powers of It0 and of the squared-difference generator
Ilam0 in denominators.

Monomials are stored as bit-packed exponent vectors (9 bits per symbol),
so multiplying monomials is integer addition; exponents beyond 511 are far
outside the intended desk scale.  Coefficients are kept as integers over
one content-normalized denominator per polynomial, so the inner loops run
on machine integers rather than Fraction objects.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .harmonic import SliceCoordinates, slice_basis
from .invariants import quartic_aux_from_printed, slice_invariants

_EXP_BITS = 9
_EXP_MASK = (1 << _EXP_BITS) - 1


class NotInvariantError(ValueError):
    """Residual coordinate symbols survived rewriting."""

    def __init__(self, message: str, residual: str | None = None):
        super().__init__(message)
        self.residual = residual


class RewriteBudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Polynomials over a named symbol set


@dataclass(frozen=True)
class SymbolTable:
    names: tuple[str, ...]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown symbol {name!r}") from None

    def pack(self, exps) -> int:
        key = 0
        for i, e in enumerate(exps):
            if e < 0 or e > _EXP_MASK:
                raise ValueError(f"exponent {e} out of range")
            key |= e << (_EXP_BITS * i)
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_EXP_BITS * i)) & _EXP_MASK
                     for i in range(len(self.names)))


class Polynomial:
    """Sparse polynomial: packed exponent key -> integer coefficient.

    One positive denominator applies to the whole polynomial; the stored
    form is content-normalized (gcd of coefficients and denominator is 1),
    so structural equality is mathematical equality.
    """

    __slots__ = ("table", "terms", "den")

    def __init__(self, table: SymbolTable, terms: dict[int, int] | None = None,
                 den: int = 1):
        self.table = table
        clean = {e: c for e, c in (terms or {}).items() if c}
        if den <= 0:
            raise ValueError("denominator must be positive")
        if not clean:
            den = 1
        elif den != 1:
            g = den
            for c in clean.values():
                g = math.gcd(g, c)
                if g == 1:
                    break
            if g > 1:
                clean = {e: c // g for e, c in clean.items()}
                den //= g
        self.terms = clean
        self.den = den

    @classmethod
    def constant(cls, table: SymbolTable, value) -> "Polynomial":
        value = Fraction(value)
        return cls(table, {0: value.numerator}, value.denominator)

    @classmethod
    def symbol(cls, table: SymbolTable, name: str) -> "Polynomial":
        idx = table.index(name)
        return cls(table, {1 << (_EXP_BITS * idx): 1})

    @classmethod
    def from_exponents(cls, table: SymbolTable, terms) -> "Polynomial":
        fracs = {table.pack(e): Fraction(c) for e, c in terms.items()}
        den = 1
        for f in fracs.values():
            den = math.lcm(den, f.denominator)
        return cls(table, {k: int(f * den) for k, f in fracs.items()}, den)

    def coefficient(self, key: int) -> Fraction:
        return Fraction(self.terms.get(key, 0), self.den)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.table == other.table and self.den == other.den
                and self.terms == other.terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        den = math.lcm(self.den, other.den)
        m1 = den // self.den
        m2 = den // other.den
        out = {e: c * m1 for e, c in self.terms.items()}
        get = out.get
        for e, c in other.terms.items():
            out[e] = get(e, 0) + c * m2
            get = out.get
        return Polynomial(self.table, out, den)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        den = math.lcm(self.den, other.den)
        m1 = den // self.den
        m2 = den // other.den
        out = {e: c * m1 for e, c in self.terms.items()}
        get = out.get
        for e, c in other.terms.items():
            out[e] = get(e, 0) - c * m2
            get = out.get
        return Polynomial(self.table, out, den)

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        return Polynomial(self.table,
                          {e: v * c.numerator for e, v in self.terms.items()},
                          self.den * c.denominator)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict[int, int] = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = e1 + e2
                out[key] = get(key, 0) + c1 * c2
                get = out.get
        return Polynomial(self.table, out, self.den * other.den)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial.constant(self.table, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def degree_in(self, idx: int) -> int:
        shift = _EXP_BITS * idx
        return max(((e >> shift) & _EXP_MASK for e in self.terms), default=0)

    def uses(self, indices) -> bool:
        mask = 0
        for i in indices:
            mask |= _EXP_MASK << (_EXP_BITS * i)
        return any(e & mask for e in self.terms)

    def evaluate(self, values: list[Fraction]) -> Fraction:
        total = Fraction(0)
        power_cache: dict[tuple[int, int], Fraction] = {}
        for key, c in self.terms.items():
            prod = Fraction(c)
            idx = 0
            while key:
                e = key & _EXP_MASK
                if e:
                    p = power_cache.get((idx, e))
                    if p is None:
                        p = values[idx] ** e
                        power_cache[(idx, e)] = p
                    prod *= p
                key >>= _EXP_BITS
                idx += 1
            total += prod
        return total / self.den

    def _graded(self, key: int):
        exps = self.table.unpack(key)
        return (sum(exps), exps)

    def leading(self) -> tuple[int, Fraction]:
        key = max(self.terms, key=self._graded)
        return key, self.coefficient(key)

    def divide_exact(self, divisor: "Polynomial") -> "Polynomial | None":
        """Quotient when divisor divides self exactly, else None."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = self
        quot: dict[int, Fraction] = {}
        dkey, dc = divisor.leading()
        dexps = self.table.unpack(dkey)
        while not rem.is_zero():
            rkey, rc = rem.leading()
            rexps = self.table.unpack(rkey)
            if any(r < s for r, s in zip(rexps, dexps)):
                return None
            qkey = rkey - dkey
            coeff = rc / dc
            quot[qkey] = quot.get(qkey, 0) + coeff
            piece = divisor.scale(coeff)
            shifted = Polynomial(self.table,
                                 {k + qkey: c for k, c in piece.terms.items()},
                                 piece.den)
            rem = rem - shifted
        out = Polynomial(self.table, {})
        den = 1
        for f in quot.values():
            den = math.lcm(den, f.denominator)
        return Polynomial(self.table,
                          {k: int(f * den) for k, f in quot.items()}, den)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=self._graded, reverse=True):
            c = self.coefficient(key)
            exps = self.table.unpack(key)
            factors = [
                f"{self.table.names[i]}^{e}" if e > 1 else self.table.names[i]
                for i, e in enumerate(exps) if e
            ]
            if factors:
                body = "*".join(factors)
                if c == 1:
                    parts.append(body)
                elif c == -1:
                    parts.append(f"-{body}")
                else:
                    parts.append(f"{c}*{body}")
            else:
                parts.append(str(c))
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class RationalExpr:
    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ZeroDivisionError("zero denominator")

    @property
    def table(self) -> SymbolTable:
        return self.numerator.table

    def __add__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def __sub__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(
            self.numerator * other.denominator - other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def __mul__(self, other: "RationalExpr") -> "RationalExpr":
        return RationalExpr(self.numerator * other.numerator,
                            self.denominator * other.denominator)

    def __truediv__(self, other: "RationalExpr") -> "RationalExpr":
        if other.numerator.is_zero():
            raise ZeroDivisionError("division by zero expression")
        return RationalExpr(self.numerator * other.denominator,
                            self.denominator * other.numerator)

    def __pow__(self, n: int) -> "RationalExpr":
        if n < 0:
            return RationalExpr(self.denominator ** (-n), self.numerator ** (-n))
        return RationalExpr(self.numerator ** n, self.denominator ** n)

    def __neg__(self) -> "RationalExpr":
        return RationalExpr(self.numerator.scale(-1), self.denominator)

    def equals(self, other: "RationalExpr") -> bool:
        """Equality as rational functions (cross multiplication)."""
        return self.numerator * other.denominator == other.numerator * self.denominator

    def evaluate(self, env: dict[str, Fraction]) -> Fraction:
        values = [Fraction(env[name]) for name in self.table.names]
        den = self.denominator.evaluate(values)
        if den == 0:
            raise ZeroDivisionError("denominator vanished at the sample point")
        return self.numerator.evaluate(values) / den

    def __str__(self) -> str:
        if self.denominator == Polynomial.constant(self.table, 1):
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"


# ---------------------------------------------------------------------------
# Symbol tables


def minimal_symbols(d: int) -> SymbolTable:
    """Coordinate symbols ranked above generator symbols, graded-lex order."""
    basis = slice_basis(d)
    k = basis.k_slice
    names = ["a1", "a2", "a3"]
    names += [f"al[{i}][{j}]" for i in (1, 2, 3) for j in range(1, k)]
    if basis.w_infinity is not None:
        names.append("ainf")
    names += [f"P[{i}][0]" for i in (1, 2, 3)]
    names += [f"P[{i}][{j}]" for i in (1, 2, 3) for j in range(1, k)]
    if basis.w_infinity is not None:
        names.append("Pinf")
    return SymbolTable(tuple(names))


def aux_symbols() -> SymbolTable:
    names = [f"lam{i}" for i in (1, 2, 3)]
    names += [f"r{i}" for i in (1, 2, 3)]
    names += [f"s{i}" for i in (1, 2, 3)]
    names += [f"a{i}" for i in (1, 2, 3)]
    names += [f"Ilam{i}" for i in (1, 2, 3)]
    names += [f"Ir{i}" for i in (1, 2, 3)]
    names += [f"Is{i}" for i in (1, 2, 3)]
    names += ["It0", "It1", "It2", "It3"]
    return SymbolTable(tuple(names))


def symbol(table: SymbolTable, name: str) -> RationalExpr:
    return RationalExpr(Polynomial.symbol(table, name),
                        Polynomial.constant(table, 1))


def constant(table: SymbolTable, value) -> RationalExpr:
    return RationalExpr(Polynomial.constant(table, value),
                        Polynomial.constant(table, 1))


# ---------------------------------------------------------------------------
# Substitution machinery


class _Budget:
    """Rule-application counter.

    A rule application is one invocation of a substitution rule on the
    whole expression (the printed rules rewrite a full coordinate column at
    once) or one unfolding of a power rule to a new exponent; term-level
    bookkeeping inside an application is not charged.
    """

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise RewriteBudgetExceeded(
                f"rewriting exceeded {self.limit} rule applications")


def _merge_scaled(acc: dict[int, int], base_key: int, base_coeff: int,
                  terms: dict[int, int], scale: int) -> None:
    # acc += (base monomial) * (terms scaled), in place, all-integer
    m = base_coeff * scale
    get = acc.get
    for key, c in terms.items():
        full = base_key + key
        acc[full] = get(full, 0) + m * c


def _combine(table: SymbolTable, entries, in_den: int) -> Polynomial:
    """Sum of base_monomial * factor_polynomial over a common denominator.

    entries: iterable of (base_key, base_coeff_int, factor Polynomial|None);
    a None factor stands for the constant 1.
    """
    den = 1
    for _, _, f in entries:
        if f is not None:
            den = math.lcm(den, f.den)
    acc: dict[int, int] = {}
    get = acc.get
    for base_key, c, f in entries:
        if f is None:
            acc[base_key] = get(base_key, 0) + c * den
            get = acc.get
        else:
            _merge_scaled(acc, base_key, c, f.terms, den // f.den)
            get = acc.get
    return Polynomial(table, acc, in_den * den)


def _substitute(poly: Polynomial, idx: int, num: Polynomial, den: Polynomial,
                budget: _Budget) -> tuple[Polynomial, Polynomial]:
    """Replace symbol idx by num/den, multiplying through; returns (poly', den^E)."""
    top = poly.degree_in(idx)
    one = Polynomial.constant(poly.table, 1)
    if top == 0:
        return poly, one
    budget.spend()
    num_pow = [one]
    den_pow = [one]
    for _ in range(top):
        num_pow.append(num_pow[-1] * num)
        den_pow.append(den_pow[-1] * den)
    shift = _EXP_BITS * idx
    factor_cache: dict[int, Polynomial] = {}
    entries = []
    for key, c in poly.terms.items():
        e = (key >> shift) & _EXP_MASK
        factor = factor_cache.get(e)
        if factor is None:
            factor = num_pow[e] * den_pow[top - e]
            factor_cache[e] = factor
        entries.append((key - (e << shift), c, factor))
    return _combine(poly.table, entries, poly.den), den_pow[top]


def _substitute_common(poly: Polynomial, rules: dict[int, Polynomial],
                       den: Polynomial, budget: _Budget) -> tuple[Polynomial, Polynomial]:
    """Simultaneously replace each symbol idx by rules[idx]/den.

    All rules share one denominator, so a term of total substituted degree g
    picks up den^(G - g) with a single global G; this avoids stacking a
    separate den power per symbol.
    Returns (poly', den^G).
    """
    one = Polynomial.constant(poly.table, 1)
    shifts = {idx: _EXP_BITS * idx for idx in rules}
    sub_mask = 0
    for idx in rules:
        sub_mask |= _EXP_MASK << (_EXP_BITS * idx)
    top = 0
    for key in poly.terms:
        if key & sub_mask:
            top = max(top, sum((key >> s) & _EXP_MASK for s in shifts.values()))
    if top == 0:
        return poly, one
    budget.spend(sum(1 for idx in rules if poly.degree_in(idx)))
    den_pow = [one]
    for _ in range(top):
        den_pow.append(den_pow[-1] * den)
    factor_cache: dict[tuple, Polynomial] = {}
    entries = []
    for key, c in poly.terms.items():
        pattern = []
        g = 0
        rest = key
        for idx, s in shifts.items():
            e = (key >> s) & _EXP_MASK
            if e:
                g += e
                rest -= e << s
                pattern.append((idx, e))
        pat_key = tuple(pattern)
        factor = factor_cache.get(pat_key)
        if factor is None:
            factor = den_pow[top - g]
            for idx, e in pattern:
                factor = factor * rules[idx] ** e
            factor_cache[pat_key] = factor
        entries.append((rest, c, factor))
    return _combine(poly.table, entries, poly.den), den_pow[top]


def _reduce_power(poly: Polynomial, idx: int, order: int, rhs: Polynomial,
                  budget: _Budget) -> Polynomial:
    """Monomial reduction sym^order -> rhs to fixpoint.

    Pure powers sym^e are normalized once each (memoized unfoldings of the
    rule) and substituted term by term, which matches iterated single-step
    reduction but touches every input term only once.
    """
    table = poly.table
    if poly.degree_in(idx) < order:
        return poly
    shift = _EXP_BITS * idx
    cache: dict[int, Polynomial] = {}

    def normal_form(e: int) -> Polynomial:
        if e < order:
            return Polynomial(table, {e << shift: 1})
        hit = cache.get(e)
        if hit is None:
            budget.spend()
            entries = []
            for key, c in rhs.terms.items():
                d = (key >> shift) & _EXP_MASK
                entries.append((key - (d << shift), c, normal_form(e - order + d)))
            cache[e] = hit = _combine(table, entries, rhs.den)
        return hit

    entries = []
    for key, c in poly.terms.items():
        e = (key >> shift) & _EXP_MASK
        if e < order:
            entries.append((key, c, None))
        else:
            entries.append((key - (e << shift), c, normal_form(e)))
    return _combine(table, entries, poly.den)


# ---------------------------------------------------------------------------
# Minimal-system rules


class _MinimalRules:
    def __init__(self, d: int):
        self.d = d
        basis = slice_basis(d)
        self.k = basis.k_slice
        self.sig = basis.signature
        self.has_inf = basis.w_infinity is not None
        t = self.table = minimal_symbols(d)
        P = lambda name: Polynomial.symbol(t, name)
        self.a = [P("a1"), P("a2"), P("a3")]
        sq = [x * x for x in self.a]
        self.delta = (sq[0] - sq[1]) * (sq[1] - sq[2]) * (sq[2] - sq[0])
        self.pair = [self.a[1] * self.a[2], self.a[2] * self.a[0], self.a[0] * self.a[1]]
        q4 = [x * x for x in sq]
        self.cmatrix = (
            ((sq[2] - sq[1]) * sq[1] * sq[2], q4[1] - q4[2], sq[2] - sq[1]),
            ((sq[0] - sq[2]) * sq[2] * sq[0], q4[2] - q4[0], sq[0] - sq[2]),
            ((sq[1] - sq[0]) * sq[0] * sq[1], q4[0] - q4[1], sq[1] - sq[0]),
        )
        p10, p20, p30 = P("P[1][0]"), P("P[2][0]"), P("P[3][0]")
        self.p10, self.p20, self.p30 = p10, p20, p30
        half = Fraction(1, 2)
        self.it0 = (
            (p30 ** 3).scale(half)
            - (p10 ** 6).scale(Fraction(1, 4))
            - (p20 ** 4).scale(27)
            + p10 ** 4 * p30
            - (p10 ** 2 * p30 ** 2).scale(Fraction(5, 4))
            - (p20 ** 2 * p10 * p30).scale(9)
            + (p20 ** 2 * p10 ** 3).scale(5)
        )
        # a1 elimination: product and sum-of-squares relations combined.
        self.a1_rule = (
            p10 * self.pair[0] - self.a[1] ** 3 * self.a[2] - self.a[1] * self.a[2] ** 3,
            p20,
        )
        a2sq, a3sq = sq[1], sq[2]
        self.a2_rule = (
            p10 * a2sq + p10 * a3sq - a2sq * a3sq - a3sq * a3sq
            + (p30 - p10 * p10).scale(half)
        )
        self.a3_rule = (
            (p30 - p10 * p10).scale(half) * a3sq + p10 * a3sq * a3sq + p20 * p20
        )
        self.coord_indices = {
            i for i, name in enumerate(t.names)
            if name.startswith(("a1", "a2", "a3", "al[", "ainf"))
        }

    def alpha_rule(self, i: int, j: int) -> Polynomial:
        """Numerator of the column rule over the common denominator It0 * P20."""
        zeta, xi = self.sig.zeta[j], self.sig.xi[j]
        pcol = [Polynomial.symbol(self.table, f"P[{m}][{j}]") for m in (1, 2, 3)]
        num = self.cmatrix[i - 1][0] * pcol[0] + self.cmatrix[i - 1][1] * pcol[1] \
            + self.cmatrix[i - 1][2] * pcol[2]
        if zeta == 0:
            num = num * self.delta
        num = num * (self.pair[i - 1] if xi else self.p20)
        return num

    def rewrite_poly(self, poly: Polynomial, budget: _Budget) -> tuple[Polynomial, Polynomial]:
        table = self.table
        den_total = Polynomial.constant(table, 1)
        current = poly
        column_rules: dict[int, Polynomial] = {}
        common_den = self.it0 * self.p20
        for i in (1, 2, 3):
            for j in range(1, self.k):
                idx = table.index(f"al[{i}][{j}]")
                if current.degree_in(idx):
                    column_rules[idx] = self.alpha_rule(i, j)
        if self.has_inf:
            idx = table.index("ainf")
            if current.degree_in(idx):
                column_rules[idx] = Polynomial.symbol(table, "Pinf") * common_den
        if column_rules:
            current, factor = _substitute_common(current, column_rules, common_den, budget)
            den_total = den_total * factor
        idx = table.index("a1")
        if current.degree_in(idx):
            current, factor = _substitute(current, idx, *self.a1_rule, budget=budget)
            den_total = den_total * factor
        current = _reduce_power(current, table.index("a2"), 4, self.a2_rule, budget)
        current = _reduce_power(current, table.index("a3"), 6, self.a3_rule, budget)
        return current, den_total

    def residual(self, poly: Polynomial) -> str | None:
        if poly.uses(self.coord_indices):
            return str(poly)
        return None


_minimal_rules_cache: dict[int, _MinimalRules] = {}


def _minimal_rules(d: int) -> _MinimalRules:
    rules = _minimal_rules_cache.get(d)
    if rules is None:
        rules = _MinimalRules(d)
        _minimal_rules_cache[d] = rules
    return rules


def rewrite_invariant(expr: RationalExpr, d: int,
                      max_applications: int = 10000) -> RationalExpr:
    """Express an invariant of the slice coordinates in the generators.

    Numerator and denominator are rewritten independently; if either keeps
    coordinate symbols, a balanced second attempt on (num*den)/(den^2) covers
    quotients of merely sign-twisted parts.  Raises NotInvariantError when
    residual coordinate symbols survive both attempts.
    """
    rules = _minimal_rules(d)
    if expr.table != rules.table:
        raise ValueError("expression does not use the symbol table for this degree")
    return _rewrite_with(rules, expr, max_applications)


def _rewrite_with(rules, expr: RationalExpr, max_applications: int) -> RationalExpr:
    budget = _Budget(max_applications)
    num, num_den = rules.rewrite_poly(expr.numerator, budget)
    den, den_den = rules.rewrite_poly(expr.denominator, budget)
    bad = rules.residual(num) or rules.residual(den)
    if bad is None:
        return RationalExpr(num * den_den, den * num_den)
    # A balanced retry only helps when the denominator itself carries
    # coordinate symbols (sign-twisted quotients).
    if expr.denominator.uses(rules.coord_indices):
        balanced_num, bn_den = rules.rewrite_poly(
            expr.numerator * expr.denominator, budget)
        balanced_den, bd_den = rules.rewrite_poly(
            expr.denominator * expr.denominator, budget)
        bad = rules.residual(balanced_num) or rules.residual(balanced_den)
        if bad is None:
            return RationalExpr(balanced_num * bd_den, balanced_den * bn_den)
    raise NotInvariantError(
        "input is not an invariant: residual coordinate symbols remain", bad)


# ---------------------------------------------------------------------------
# Quartic auxiliary system


class _AuxRules:
    def __init__(self):
        t = self.table = aux_symbols()
        P = lambda name: Polynomial.symbol(t, name)
        self.lam = [P("lam1"), P("lam2"), P("lam3")]
        self.t = [P("a1"), P("a2"), P("a3")]
        self.bracket = (self.lam[0] - self.lam[1]) * (self.lam[1] - self.lam[2]) \
            * (self.lam[2] - self.lam[0])
        il1, il2, il3 = P("Ilam1"), P("Ilam2"), P("Ilam3")
        self.ilam = (il1, il2, il3)
        self.it0 = P("It0")
        self.ilam0 = (
            (il2 * il1 ** 4).scale(Fraction(3, 2))
            - (il1 ** 6).scale(Fraction(1, 6))
            + (il3 * il2 * il1).scale(6)
            - (il3 * il1 ** 3).scale(Fraction(4, 3))
            - (il2 ** 2 * il1 ** 2).scale(Fraction(7, 2))
            - (il3 ** 2).scale(3)
            + (il2 ** 3).scale(Fraction(1, 2))
        )
        self.x_cols = {
            "r": [P("Ir1"), P("Ir2"), P("Ir3")],
            "s": [P("Is1"), P("Is2"), P("Is3")],
            "t": [P("It1"), P("It2"), P("It3")],
        }
        one = Polynomial.constant(t, 1)
        self.lam1_rule = (il1 - self.lam[1] - self.lam[2], one)
        self.lam2_rule = (
            il1 * self.lam[1] + il1 * self.lam[2] - self.lam[2] * self.lam[1]
            - self.lam[2] ** 2 + (il2 - il1 * il1).scale(Fraction(1, 2))
        )
        self.lam3_rule = (
            il3.scale(Fraction(1, 3)) + (il1 ** 3).scale(Fraction(1, 6))
            - (il2 * il1).scale(Fraction(1, 2))
            + (il2 - il1 * il1).scale(Fraction(1, 2)) * self.lam[2]
            + il1 * self.lam[2] ** 2
        )
        self.coord_indices = {
            i for i, name in enumerate(t.names)
            if name.startswith(("lam", "r", "s", "a"))
        }

    def _vand_row(self, col: str, i: int) -> Polynomial:
        c = self.x_cols[col]
        return c[0] + self.lam[i] * c[1] + self.lam[i] * self.lam[i] * c[2]

    def rewrite_poly(self, poly: Polynomial, budget: _Budget) -> tuple[Polynomial, Polynomial]:
        table = self.table
        one = Polynomial.constant(table, 1)
        den_total = one
        current = poly
        # s_i -> bracket * t_j t_k * (Is row) over the common It0 * Ilam0
        s_rules: dict[int, Polynomial] = {}
        for i in range(3):
            idx = table.index(f"s{i + 1}")
            if current.degree_in(idx):
                s_rules[idx] = self.bracket * self.t[(i + 1) % 3] \
                    * self.t[(i + 2) % 3] * self._vand_row("s", i)
        if s_rules:
            current, factor = _substitute_common(current, s_rules,
                                                 self.it0 * self.ilam0, budget)
            den_total = den_total * factor
        # r_i -> Vandermonde row in the Ir generators
        for i in range(3):
            idx = table.index(f"r{i + 1}")
            if current.degree_in(idx):
                current, factor = _substitute(current, idx, self._vand_row("r", i),
                                              one, budget)
                den_total = den_total * factor
        current = self._normalize_t(current, budget)
        idx = table.index("lam1")
        if current.degree_in(idx):
            current, factor = _substitute(current, idx, *self.lam1_rule, budget=budget)
            den_total = den_total * factor
        current = _reduce_power(current, table.index("lam2"), 2, self.lam2_rule, budget)
        current = _reduce_power(current, table.index("lam3"), 3, self.lam3_rule, budget)
        return current, den_total

    def _normalize_t(self, poly: Polynomial, budget: _Budget) -> Polynomial:
        # Per monomial: an all-odd pivot part contributes one product
        # generator It0; the remaining even powers become Vandermonde rows.
        # Mixed parities are left in place (non-invariant residue).
        table = self.table
        idx = [table.index(f"a{i}") for i in (1, 2, 3)]
        shifts = [_EXP_BITS * m for m in idx]
        xrows = [self._vand_row("t", i) for i in range(3)]
        factor_cache: dict[tuple[int, int, int], Polynomial] = {}
        entries = []
        for key, c in poly.terms.items():
            e = [(key >> s) & _EXP_MASK for s in shifts]
            parities = {x % 2 for x in e}
            if len(parities) > 1 or not any(e):
                entries.append((key, c, None))
                continue
            rest = key
            for s, x in zip(shifts, e):
                rest -= x << s
            pat = tuple(e)
            factor = factor_cache.get(pat)
            if factor is None:
                budget.spend()
                factor = Polynomial.constant(table, 1)
                ee = list(e)
                if parities == {1}:
                    factor = self.it0
                    ee = [x - 1 for x in ee]
                for i in range(3):
                    if ee[i]:
                        factor = factor * xrows[i] ** (ee[i] // 2)
                factor_cache[pat] = factor
            entries.append((rest, c, factor))
        return _combine(table, entries, poly.den)

    def residual(self, poly: Polynomial) -> str | None:
        if poly.uses(self.coord_indices):
            return str(poly)
        return None


_aux_rules_singleton: _AuxRules | None = None


def _aux_rules() -> _AuxRules:
    global _aux_rules_singleton
    if _aux_rules_singleton is None:
        _aux_rules_singleton = _AuxRules()
    return _aux_rules_singleton


def quartic_aux_rewrite(expr: RationalExpr, max_applications: int = 10000) -> RationalExpr:
    """Rewrite a quartic invariant through the 13-element auxiliary system."""
    rules = _aux_rules()
    if expr.table != rules.table:
        raise ValueError("expression does not use the auxiliary symbol table")
    return _rewrite_with(rules, expr, max_applications)


def aux_denominator_factors() -> tuple[Polynomial, Polynomial]:
    """(It0, Ilam0) as polynomials, for denominator-discipline checks."""
    rules = _aux_rules()
    return rules.it0, rules.ilam0


# ---------------------------------------------------------------------------
# The auxiliary quartic generators through the minimal system


def _quartic_conversion():
    """Auxiliary quartic coordinates as minimal-symbol expressions.

    The slice blocks are matched to the integer-normalized quartic family
    by label, and the recorded scale factors convert our coordinates to
    the classical ones.
    """
    from .reference import reference_scales

    table = minimal_symbols(2)
    scales = reference_scales(4)
    basis = slice_basis(2)
    by_family = {}
    for j, block in enumerate(basis.blocks):
        if block.label.startswith("deg4.j"):
            by_family[int(block.label.split("j")[-1])] = j
    quad_j = next(j for j, b in enumerate(basis.blocks) if b.label == "quad")

    def coord(i, j):
        name = f"a{i}" if j == 0 else f"al[{i}][{j}]"
        return symbol(table, name)

    lam = [coord(i, quad_j) for i in (1, 2, 3)]
    r = [constant(table, scales[(1, 0)]) * coord(i, by_family[0]) for i in (1, 2, 3)]
    s = [constant(table, scales[(1, 1)]) * coord(i, by_family[1]) for i in (1, 2, 3)]
    t = [constant(table, scales[(1, 2)]) * coord(i, by_family[2]) for i in (1, 2, 3)]
    return table, lam, r, s, t


def quartic_aux_coordinate_expressions() -> dict[str, RationalExpr]:
    """The 13 auxiliary quartic generators as slice-coordinate expressions.

    The s-block entries are polynomial: the alternating factor in their
    column cancels the Vandermonde determinant exactly.
    """
    table, lam, r, s, t = _quartic_conversion()
    exprs = {
        "Ilam1": lam[0] + lam[1] + lam[2],
        "Ilam2": lam[0] ** 2 + lam[1] ** 2 + lam[2] ** 2,
        "Ilam3": lam[0] ** 3 + lam[1] ** 3 + lam[2] ** 3,
        "It0": t[0] * t[1] * t[2],
    }
    det = (lam[1] - lam[0]) * (lam[2] - lam[0]) * (lam[2] - lam[1])
    inv_rows = (
        (lam[1] * lam[2] * (lam[2] - lam[1]),
         -(lam[0] * lam[2] * (lam[2] - lam[0])),
         lam[0] * lam[1] * (lam[1] - lam[0])),
        (-(lam[2] ** 2 - lam[1] ** 2), lam[2] ** 2 - lam[0] ** 2,
         -(lam[1] ** 2 - lam[0] ** 2)),
        (lam[2] - lam[1], -(lam[2] - lam[0]), lam[1] - lam[0]),
    )
    for i in range(3):
        exprs[f"Is{i + 1}"] = (inv_rows[i][0] * s[0] * t[0]
                               + inv_rows[i][1] * s[1] * t[1]
                               + inv_rows[i][2] * s[2] * t[2])
    for name, col in (("Ir", r), ("It", [x * x for x in t])):
        for i in range(3):
            num = (inv_rows[i][0] * col[0] + inv_rows[i][1] * col[1]
                   + inv_rows[i][2] * col[2])
            exprs[f"{name}{i + 1}"] = num / det
    return exprs


def _det3_expr(rows):
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


_aux_in_minimal_cache: dict[str, RationalExpr] | None = None


def quartic_aux_in_minimal(max_applications: int = 200000) -> dict[str, RationalExpr]:
    """The 13 auxiliary quartic generators written in the minimal generators.

    Power sums, moment columns and the s-block entries are rewritten
    directly; the Vandermonde solves for the r and squared-pivot columns
    then go through the invariant moment matrix (Hankel in the rewritten
    power sums) by Cramer's rule, which keeps every symbolic reduction at
    low coordinate degree.
    """
    global _aux_in_minimal_cache
    if _aux_in_minimal_cache is not None:
        return _aux_in_minimal_cache

    table, lam, r, s, t = _quartic_conversion()
    rw = lambda e: rewrite_invariant(e, 2, max_applications)
    one = constant(table, 1)

    def power_sum(col, k):
        total = constant(table, 0)
        for m in range(3):
            total = total + col[m] * (lam[m] ** k if k else one)
        return total

    out: dict[str, RationalExpr] = {}
    L = [constant(table, 3)]  # p_0 = 3
    for k in (1, 2, 3):
        L.append(rw(power_sum([one, one, one], k)))
    out["Ilam1"], out["Ilam2"], out["Ilam3"] = L[1], L[2], L[3]
    out["It0"] = rw(t[0] * t[1] * t[2])

    coord_exprs = quartic_aux_coordinate_expressions()
    for i in (1, 2, 3):
        out[f"Is{i}"] = rw(coord_exprs[f"Is{i}"])

    # Newton: elementary symmetric functions and the fourth power sum.
    half = constant(table, Fraction(1, 2))
    sixth = constant(table, Fraction(1, 6))
    e1 = L[1]
    e2 = (L[1] * L[1] - L[2]) * half
    e3 = (L[1] ** 3 - constant(table, 3) * L[1] * L[2] + constant(table, 2) * L[3]) * sixth
    p4 = e1 * L[3] - e2 * L[2] + e3 * L[1]
    hankel = [[L[0], L[1], L[2]], [L[1], L[2], L[3]], [L[2], L[3], p4]]
    det_h = _det3_expr(hankel)

    for name, col in (("Ir", r), ("It", [x * x for x in t])):
        moments = [rw(power_sum(col, k)) for k in (0, 1, 2)]
        for i in range(3):
            replaced = [
                [moments[row] if colidx == i else hankel[row][colidx]
                 for colidx in range(3)]
                for row in range(3)
            ]
            out[f"{name}{i + 1}"] = _det3_expr(replaced) / det_h
    _aux_in_minimal_cache = out
    return out


# ---------------------------------------------------------------------------
# Numeric verification


def _sample_minimal_env(rng, d: int) -> dict[str, Fraction]:
    basis = slice_basis(d)
    k = basis.k_slice
    while True:
        a = tuple(Fraction(rng.randint(1, 9) * rng.choice((1, -1)), rng.randint(1, 3))
                  for _ in range(3))
        sq = sorted(x * x for x in a)
        if 0 not in a and sq[0] != sq[1] != sq[2]:
            break
    alpha = tuple(
        tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(k - 1))
        for _ in range(3)
    )
    alpha_inf = Fraction(rng.randint(-9, 9)) if basis.w_infinity is not None else None
    coords = SliceCoordinates(d, a, alpha, alpha_inf)
    vec = slice_invariants(coords)
    env: dict[str, Fraction] = {f"a{i + 1}": a[i] for i in range(3)}
    for i in (1, 2, 3):
        for j in range(1, k):
            env[f"al[{i}][{j}]"] = alpha[i - 1][j - 1]
        env[f"P[{i}][0]"] = vec.p0[i - 1]
        for j in range(1, k):
            env[f"P[{i}][{j}]"] = vec.p[i - 1][j - 1]
    if alpha_inf is not None:
        env["ainf"] = alpha_inf
        env["Pinf"] = vec.p_infinity
    return env


def _sample_aux_env(rng) -> dict[str, Fraction]:
    while True:
        lam = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(3))
        if (lam[0] - lam[1]) * (lam[1] - lam[2]) * (lam[2] - lam[0]) != 0:
            break
    while True:
        t = tuple(Fraction(rng.randint(1, 9) * rng.choice((1, -1)), rng.randint(1, 3))
                  for _ in range(3))
        if 0 not in t:
            break
    r = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(3))
    s = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(3))
    aux = quartic_aux_from_printed(lam, r, s, t)
    env: dict[str, Fraction] = {}
    for i in range(3):
        env[f"lam{i + 1}"] = lam[i]
        env[f"r{i + 1}"] = r[i]
        env[f"s{i + 1}"] = s[i]
        env[f"a{i + 1}"] = t[i]
        env[f"Ilam{i + 1}"] = aux.lam[i]
        env[f"Ir{i + 1}"] = aux.r[i]
        env[f"Is{i + 1}"] = aux.s[i]
        env[f"It{i + 1}"] = aux.t[i]
    env["It0"] = aux.t0
    return env


def verify_rewrite(original: RationalExpr, rewritten: RationalExpr, d: int,
                   samples: int = 100, seed: int = 0, system: str = "minimal") -> bool:
    """Evaluate both expressions at random generic coordinates and compare.

    Generator symbols are substituted by their values on the same sample;
    agreement is required within 1e-9 relative on every sample.
    """
    import random as _random

    rng = _random.Random(seed)
    done = 0
    attempts = 0
    while done < samples:
        attempts += 1
        if attempts > 20 * samples + 100:
            raise RuntimeError("could not find enough generic sample points")
        env = _sample_aux_env(rng) if system == "aux" else _sample_minimal_env(rng, d)
        try:
            lhs = original.evaluate(env)
            rhs = rewritten.evaluate(env)
        except ZeroDivisionError:
            continue
        done += 1
        x, y = float(lhs), float(rhs)
        if abs(x - y) > 1e-9 * (1.0 + max(abs(x), abs(y))):
            return False
    return True


# ---------------------------------------------------------------------------
# Expression parsing and JSON round-tripping
#
# Grammar:  expr   := term (('+'|'-') term)*
#           term   := unary (('*'|'/') unary)*
#           unary  := '-' unary | power
#           power  := atom ('^' integer)?
#           atom   := integer | symbol | '(' expr ')'
# Symbols: bare identifiers (a1, ainf, lam2, It0, ...) optionally followed
# by bracketed indices, e.g. al[1][2] or P[3][0].


_TOKEN_RE = re.compile(r"\s*(\d+|[A-Za-z]\w*(?:\[\d+\])*|[-+*/^()])")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"bad character in expression at position {pos}: {text[pos]!r}")
        tokens.append(match.group(1))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], table: SymbolTable):
        self.tokens = tokens
        self.pos = 0
        self.table = table

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of expression")
        self.pos += 1
        return tok

    def parse(self) -> RationalExpr:
        expr = self.expr()
        if self.peek() is not None:
            raise ValueError(f"unexpected token {self.peek()!r}")
        return expr

    def expr(self) -> RationalExpr:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self) -> RationalExpr:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            node = node * rhs if op == "*" else node / rhs
        return node

    def unary(self) -> RationalExpr:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> RationalExpr:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            tok = self.take()
            if not tok.isdigit():
                raise ValueError(f"exponent must be an integer, got {tok!r}")
            return base ** (sign * int(tok))
        return base

    def atom(self) -> RationalExpr:
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            if self.take() != ")":
                raise ValueError("missing closing parenthesis")
            return inner
        if tok.isdigit():
            return constant(self.table, int(tok))
        if re.fullmatch(r"[A-Za-z]\w*(?:\[\d+\])*", tok):
            try:
                return symbol(self.table, tok)
            except KeyError as exc:
                raise ValueError(str(exc)) from None
        raise ValueError(f"unexpected token {tok!r}")


def parse_expression(text: str, d: int = 2, system: str = "minimal") -> RationalExpr:
    table = aux_symbols() if system == "aux" else minimal_symbols(d)
    return _Parser(_tokenize(text), table).parse()


def expr_to_json(expr: RationalExpr) -> dict:
    def poly_terms(poly: Polynomial):
        table = poly.table
        keys = sorted(poly.terms, key=poly._graded, reverse=True)
        return [[str(poly.coefficient(k)), list(table.unpack(k))] for k in keys]

    return {
        "symbols": list(expr.table.names),
        "numerator": poly_terms(expr.numerator),
        "denominator": poly_terms(expr.denominator),
    }


def expr_from_json(data: dict) -> RationalExpr:
    table = SymbolTable(tuple(data["symbols"]))

    def poly(terms) -> Polynomial:
        return Polynomial.from_exponents(table, {tuple(e): Fraction(c) for c, e in terms})

    return RationalExpr(poly(data["numerator"]), poly(data["denominator"]))
