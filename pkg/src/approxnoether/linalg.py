"""Exact linear algebra over the field of rational functions in parameters.

Matrix entries are Laurent polynomials in named parameters with rational
coefficients (:class:`Poly`).  Physical parameters are generic, so a
nonzero polynomial is a valid pivot.  Elimination is fraction-free: every
division performed is exact in the polynomial ring, so entries never leave
it.  Columns whose entries are all rational are eliminated first with plain
rational pivots, which keeps the polynomial phase small.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .expr import _NO_TRIG, _ZERO_JETS, Expr


class Poly:
    """Laurent polynomial: ``{((name, exp), ...): Fraction}``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, q) -> "Poly":
        q = Fraction(q)
        return cls._raw({(): q} if q else {})

    @classmethod
    def _raw(cls, terms):
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def from_expr(cls, e: Expr) -> "Poly":
        out = {}
        for (params, jets, phi, trig), c in e.items():
            if jets != _ZERO_JETS or phi or trig != _NO_TRIG:
                raise ValueError(f"{e} is not a polynomial in parameters only")
            out[params] = c
        return cls._raw(out)

    def to_expr(self) -> Expr:
        return Expr._raw({(k, _ZERO_JETS, 0, _NO_TRIG): c for k, c in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Poly({self.to_expr()})"

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Poly._raw(out)

    def __neg__(self):
        return Poly._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q) -> "Poly":
        if not q:
            return Poly()
        return Poly._raw({k: c * q for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if other.is_const():
            return self.scale(other.const_value())
        if self.is_const():
            return other.scale(self.const_value())
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _mono_mul(k1, k2)
                s = out.get(k, 0) + c1 * c2
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return Poly._raw(out)

    def leading_sign(self) -> int:
        if not self.terms:
            return 0
        gens = sorted({n for k in self.terms for n, _ in k})
        top = max(self.terms, key=lambda k: _dense(k, gens))
        return 1 if self.terms[top] > 0 else -1


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for n, e in b:
        s = d.get(n, 0) + e
        if s:
            d[n] = s
        else:
            del d[n]
    return tuple(sorted(d.items()))


def _dense(k, gens):
    d = dict(k)
    return tuple(d.get(g, 0) for g in gens)


def _sparse(t, gens):
    return tuple((g, e) for g, e in zip(gens, t) if e)


def _min_exponents(terms, gens):
    lo = None
    for k in terms:
        t = _dense(k, gens)
        lo = t if lo is None else tuple(min(x, y) for x, y in zip(lo, t))
    return lo


def exact_div(a: Poly, b: Poly) -> Poly | None:
    """``a / b`` if it is a Laurent polynomial, else ``None``."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return Poly()
    if b.is_const():
        return a.scale(1 / b.const_value())
    gens = sorted({n for k in list(a.terms) + list(b.terms) for n, _ in k})
    sa = _min_exponents(a.terms, gens)
    sb = _min_exponents(b.terms, gens)
    rem = {tuple(x - s for x, s in zip(_dense(k, gens), sa)): c for k, c in a.terms.items()}
    div = {tuple(x - s for x, s in zip(_dense(k, gens), sb)): c for k, c in b.terms.items()}
    lt = max(div)
    lc = div[lt]
    quot: dict = {}
    while rem:
        top = max(rem)
        shift = tuple(x - y for x, y in zip(top, lt))
        if min(shift) < 0:
            return None
        q = rem[top] / lc
        quot[shift] = q
        for k, c in div.items():
            kk = tuple(x + y for x, y in zip(k, shift))
            s = rem.get(kk, 0) - q * c
            if s:
                rem[kk] = s
            else:
                rem.pop(kk, None)
    offset = tuple(x - y for x, y in zip(sa, sb))
    return Poly._raw({_sparse(tuple(x + o for x, o in zip(k, offset)), gens): c
                      for k, c in quot.items()})


# ----------------------------------------------------------------------
# sparse rows: dict column -> Poly

Row = dict


def _row_combine(p: Poly, ri: Row, a: Poly, rk: Row, prev: Poly | None) -> Row:
    """(p*ri - a*rk) / prev, dropping zeros."""
    out = {}
    for j in set(ri) | set(rk):
        v = Poly()
        if j in ri:
            v = ri[j] * p
        if j in rk:
            v = v - rk[j] * a
        if v and prev is not None:
            q = exact_div(v, prev)
            if q is None:
                raise ArithmeticError("fraction-free step produced a non-exact division")
            v = q
        if v:
            out[j] = v
    return out


def ff_gauss_jordan(rows: Sequence[Row], columns: Sequence) -> tuple[list[Row], list, Poly]:
    """Fraction-free Gauss-Jordan elimination over the given column order.

    Returns (pivot rows, pivot columns, common pivot value ``d``).  Every
    pivot row has the entry ``d`` at its own pivot column and zero at all
    other pivot columns.
    """
    work = [dict(r) for r in rows if r]
    pivots: list[Row] = []
    pcols = []
    prev = Poly.const(1)
    for col in columns:
        idx = next((i for i, r in enumerate(work) if col in r), None)
        if idx is None:
            continue
        prow = work.pop(idx)
        p = prow[col]
        new_pivots = []
        for r in pivots:
            a = r.get(col)
            new_pivots.append(_row_combine(p, r, a if a else Poly(), prow, prev))
        new_work = []
        for r in work:
            a = r.get(col)
            if a:
                r = _row_combine(p, r, a, prow, prev)
            elif not prev.is_const() or prev.const_value() != 1 or not p.is_const() or p.const_value() != 1:
                r = _row_combine(p, r, Poly(), prow, prev)
            if r:
                new_work.append(r)
        pivots = new_pivots + [prow]
        pcols.append(col)
        work = new_work
        prev = p
    return pivots, pcols, prev


def nullspace(rows: Sequence[Mapping], columns: Sequence) -> list[dict]:
    """Basis of ``{x : row . x = 0 for all rows}`` over the parameter field.

    ``rows`` map column -> Poly.  Returned vectors map column -> Poly with
    polynomial entries, one per free column, ordered by the free column.
    """
    columns = list(columns)
    order = {c: i for i, c in enumerate(columns)}
    rows = [{c: v for c, v in r.items() if v} for r in rows]
    rows = [r for r in rows if r]
    rational = [c for c in columns
                if all(c not in r or r[c].is_const() for r in rows)]
    rational_set = set(rational)

    # phase 1: rational pivots only
    work = [dict(r) for r in rows]
    pivot_rows: dict = {}
    used = set()
    for col in rational:
        idx = next((i for i, r in enumerate(work) if i not in used and col in r), None)
        if idx is None:
            continue
        used.add(idx)
        prow = work[idx]
        inv = 1 / prow[col].const_value()
        prow = {c: v.scale(inv) for c, v in prow.items()}
        work[idx] = prow
        for i, r in enumerate(work):
            if i != idx and col in r:
                f = r[col].const_value()
                for c, v in prow.items():
                    s = r.get(c, Poly()) - v.scale(f)
                    if s:
                        r[c] = s
                    else:
                        r.pop(c, None)
        pivot_rows[col] = idx
    rest = [work[i] for i in range(len(work)) if i not in used and work[i]]
    for r in rest:
        assert not (set(r) & rational_set)

    # phase 2: fraction-free on parameter-dependent columns
    poly_cols = [c for c in columns if c not in rational_set]
    prows, pcols, d = ff_gauss_jordan(rest, poly_cols)
    pcol_row = dict(zip(pcols, prows))

    free = [c for c in columns if c not in pivot_rows and c not in pcol_row]
    basis = []
    for f in sorted(free, key=order.get):
        vec: dict = {}
        if f in rational_set:
            vec[f] = Poly.const(1)
        else:
            vec[f] = d
            for pc, prow in pcol_row.items():
                if f in prow:
                    vec[pc] = -prow[f]
        for pc, idx in pivot_rows.items():
            prow = work[idx]
            acc = Poly()
            for c, v in prow.items():
                if c != pc and c in vec:
                    acc = acc + v * vec[c]
            if acc:
                vec[pc] = -acc
        basis.append({c: vec[c] for c in sorted(vec, key=order.get) if vec[c]})
    return basis


def rank(vectors: Iterable[Mapping], columns: Sequence) -> int:
    _, pcols, _ = ff_gauss_jordan([dict(v) for v in vectors], list(columns))
    return len(pcols)


def in_span(v: Mapping, basis: Sequence[Mapping], columns: Sequence) -> bool:
    return rank(list(basis) + [v], columns) == rank(basis, columns)


def primitive(vec: Mapping, columns: Sequence) -> dict:
    """Deterministic normal form of a vector up to nonzero scaling.

    Divides by the leading entry when that is exact for every entry;
    otherwise clears rational content.  The leading entry ends up with a
    positive leading coefficient.
    """
    order = {c: i for i, c in enumerate(columns)}
    keys = sorted((c for c in vec if vec[c]), key=order.get)
    if not keys:
        return {}
    lead = vec[keys[0]]
    divided = {}
    for c in keys:
        q = exact_div(vec[c], lead)
        if q is None:
            divided = None
            break
        divided[c] = q
    if divided is not None:
        return divided
    nums = [x for c in keys for x in vec[c].terms.values()]
    g = 0
    l = 1
    for x in nums:
        g = gcd(g, x.numerator)
        l = lcm(l, x.denominator)
    scale = Fraction(l, g) * lead.leading_sign()
    return {c: vec[c].scale(scale) for c in keys}


def rational_rank(matrix: Sequence[Sequence]) -> int:
    """Exact rank of a dense matrix of rationals."""
    rows = [{j: Poly.const(Fraction(x)) for j, x in enumerate(r) if x} for r in matrix]
    ncols = max((len(r) for r in matrix), default=0)
    return rank(rows, range(ncols))
