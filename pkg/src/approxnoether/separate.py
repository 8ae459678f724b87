"""Separation of residuals into exact linear determining systems.

A residual is split by jet monomial (powers of u', u'', u'''), by power of
u and by phi-function.  Canonical monomials already carry one phi-function
``phi^p * {1, sin(m phi), cos(m phi)}`` each, and these are linearly
independent, so projection onto the basis is exact bookkeeping; the basis
caps only bound what the ansatz is allowed to produce.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .expr import _COS, _NO_TRIG, _SIN, _ZERO_JETS, Expr, ExprError, sum_exprs
from .linalg import Poly, rational_rank


class BasisOverflow(ExprError):
    """A phi-coefficient or u-power fell outside the configured ansatz span."""


@dataclass(frozen=True, order=True)
class BasisElement:
    p: int  # power of phi
    kind: int  # 0 none, 1 cos, 2 sin
    m: int

    @property
    def name(self) -> str:
        pre = {0: "", 1: "phi"}.get(self.p, f"phi{self.p}")
        if not self.kind:
            return pre or "one"
        fn = "cos" if self.kind == _COS else "sin"
        return f"{pre}{fn}{'' if self.m == 1 else self.m}phi"

    def to_expr(self) -> Expr:
        e = Expr.symbol("phi") ** self.p
        if self.kind:
            e = e * Expr.trig("cos" if self.kind == _COS else "sin", self.m)
        return e

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Basis:
    """phi^p * {1, sin(m phi), cos(m phi)} for p <= p_max, m <= m_max."""

    p_max: int = 1
    m_max: int = 2

    @property
    def elements(self) -> tuple:
        out = []
        for p in range(self.p_max + 1):
            out.append(BasisElement(p, 0, 0))
            for m in range(1, self.m_max + 1):
                out.append(BasisElement(p, _COS, m))
                out.append(BasisElement(p, _SIN, m))
        return tuple(out)

    def __len__(self):
        return len(self.elements)

    def element_for(self, phi_power: int, trig) -> BasisElement:
        kind, m = trig
        if phi_power > self.p_max or m > self.m_max:
            raise BasisOverflow(
                f"phi^{phi_power}*{('', 'cos', 'sin')[kind]}({m}*phi) is outside the basis"
                f" (p <= {self.p_max}, m <= {self.m_max})")
        return BasisElement(phi_power, kind, m)

    def sample_matrix(self, npoints: int | None = None) -> list:
        """Values of each element at ``2*len(basis)`` distinct rational points."""
        n = npoints or 2 * len(self)
        pts = [Fraction(k + 1, 7) for k in range(n)]
        rows = []
        for x in pts:
            xf = float(x)
            row = []
            for b in self.elements:
                v = xf ** b.p
                if b.kind == _COS:
                    v *= math.cos(b.m * xf)
                elif b.kind == _SIN:
                    v *= math.sin(b.m * xf)
                row.append(Fraction(v))
            rows.append(row)
        return rows

    def audit(self) -> bool:
        """True when the sampled basis matrix has full exact rank."""
        return rational_rank(self.sample_matrix()) == len(self)


# ----------------------------------------------------------------------

JetKey = tuple  # (up power, upp power, uppp power)


def collect_jet(residual: Expr) -> dict:
    """Partition by powers of (u', u'', u'''); values are Exprs in phi, u and symbols."""
    out: dict = {}
    for (params, jets, phi, trig), c in residual.items():
        if jets[4]:
            raise ExprError("residual contains u'''' which the separation does not handle")
        key = (jets[1], jets[2], jets[3])
        stripped = (params, (jets[0], 0, 0, 0, 0), phi, trig)
        out.setdefault(key, {})[stripped] = c
    return {k: Expr._raw(v) for k, v in out.items()}


def _split_unknown(params, unknowns):
    hit = None
    rest = []
    for name, e in params:
        if name in unknowns:
            if hit is not None or e != 1:
                raise ExprError(f"residual is not linear in the unknowns (term in {name})")
            hit = name
        else:
            rest.append((name, e))
    return hit, tuple(rest)


def expand_in_basis(coeff: Expr, basis: Basis, u_range=(-4, 6),
                    unknowns: Iterable[str] = ()) -> dict:
    """Map (u power, BasisElement) -> linear form {unknown or None: Expr in parameters}."""
    unknowns = frozenset(unknowns)
    out: dict = {}
    lo, hi = u_range
    for (params, jets, phi, trig), c in coeff.items():
        if any(jets[1:]):
            raise ExprError(f"coefficient still depends on derivatives: {coeff}")
        n = jets[0]
        if not lo <= n <= hi:
            raise BasisOverflow(f"u^{n} outside the configured range [{lo}, {hi}]")
        elem = basis.element_for(phi, trig)
        unk, rest = _split_unknown(params, unknowns)
        form = out.setdefault((n, elem), {})
        key = (rest, _ZERO_JETS, 0, _NO_TRIG)
        form.setdefault(unk, {})
        form[unk][key] = form[unk].get(key, 0) + c
    return {k: {u: Expr(v) for u, v in form.items() if Expr(v)} for k, form in out.items()
            if any(Expr(v) for v in form.values())}


@dataclass
class DeterminingSystem:
    unknowns: list
    rows: list  # homogeneous rows: {unknown: Expr in parameters}
    provenance: list  # (up, upp, uppp, u power, basis name) per row
    entries: dict = field(default_factory=dict)  # full map before deduplication
    inhomogeneous: bool = False

    def poly_rows(self) -> list:
        return [{u: Poly.from_expr(v) for u, v in r.items()} for r in self.rows]

    def reconstruct(self, values: Mapping[str, Expr] | None = None) -> Expr:
        """Sum of jet monomial * u^n * basis * linear form over all entries.

        With ``values`` None the unknowns are kept as symbols, which gives
        back the residual that produced the system.
        """
        parts = []
        for (b, c, d, n, elem), form in self.entries.items():
            mono = (Expr.symbol("up") ** b * Expr.symbol("upp") ** c
                    * Expr.symbol("uppp") ** d * Expr.symbol("u") ** n * elem.to_expr())
            for unk, coeff in form.items():
                if unk is None:
                    w = Expr.const(1)
                elif values is None:
                    w = Expr.symbol(unk)
                else:
                    w = values.get(unk, Expr())
                parts.append(mono * coeff * w)
        return sum_exprs(parts)

    def to_text(self) -> str:
        """One row per line: provenance tuple, then coefficients in unknown order."""
        lines = ["# unknowns: " + " ".join(str(u) for u in self.unknowns)]
        for prov, row in zip(self.provenance, self.rows):
            coeffs = " ".join(str(row.get(u, 0)) for u in self.unknowns)
            b, c, d, n, name = prov
            lines.append(f"({b},{c},{d},{n},{name}) : {coeffs}")
        return "\n".join(lines) + "\n"


def _row_signature(row: dict, order: list):
    """Scale-invariant signature used to drop duplicate rows."""
    from .linalg import primitive

    prim = primitive({u: Poly.from_expr(v) for u, v in row.items()}, order)
    return tuple((u, frozenset(p.terms.items())) for u, p in prim.items())


def determining_system(residual: Expr, unknowns: Sequence[str], basis: Basis,
                       u_range=(-4, 6), allow_inhomogeneous: bool = False) -> DeterminingSystem:
    """One homogeneous row per (jet powers, u power, basis element) with a nonzero form."""
    unknowns = list(unknowns)
    uset = frozenset(unknowns)
    entries = {}
    inhom = False
    for jkey, coeff in sorted(collect_jet(residual).items()):
        for (n, elem), form in expand_in_basis(coeff, basis, u_range, uset).items():
            if None in form:
                if not allow_inhomogeneous:
                    raise ExprError(
                        f"residual has a term free of unknowns at {jkey}, u^{n}, {elem}")
                inhom = True
            entries[jkey + (n, elem)] = form
    order = unknowns + [None]
    rows, prov, seen = [], [], set()
    for key in sorted(entries, key=lambda k: k[:4] + (k[4],)):
        row = entries[key]
        sig = _row_signature(row, order)
        if sig in seen:
            continue
        seen.add(sig)
        rows.append(row)
        prov.append(key[:4] + (key[4].name,))
    return DeterminingSystem(unknowns, rows, prov, entries, inhom)
