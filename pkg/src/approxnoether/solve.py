"""Order-by-order solution of the approximate Noether determining equations.

Orders are solved sequentially.  At order ``k`` the unknowns are the
coordinates ``t_j`` of the order-(k-1) solution space together with fresh
ansatz coefficients for ``xi_k``, ``eta_k`` and ``A_k``; the residual is
linear in all of them, so each order is one exact homogeneous system.

Classification uses the order-0 part ``c`` (coefficients over the five
exact generators) of each solution:

* ``trivial-lift``: ``c = 0``; the vector is ``eps`` times a lower-order
  symmetry, or a pure gauge constant.
* ``exact``: every correction ``X_j`` can be chosen inside the span of the
  exact generators, i.e. ``X0`` itself survives the perturbation.
* ``nontrivial``: ``X0`` survives only with a genuinely new correction.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .expr import ZERO, Expr, sum_exprs
from .linalg import Poly, exact_div, ff_gauss_jordan, nullspace, primitive, rank
from .noether import (EXACT_GAUGES, EXACT_GENERATORS, N_EXACT, ApproxGenerator,
                      GaugeTerm, NoetherError, PerturbedLagrangian, _Partials,
                      exact_combination, residual_from_parts)
from .separate import Basis, BasisElement, BasisOverflow, determining_system, expand_in_basis

log = logging.getLogger(__name__)

EXACT = "exact"
TRIVIAL = "trivial-lift"
NONTRIVIAL = "nontrivial"


@dataclass(frozen=True)
class SolverConfig:
    p_max: int = 1
    m_max: int = 2
    u_min: int = -4
    u_max: int = 6
    deg_xi: int = 1
    deg_eta: int = 3
    deg_gauge: int = 3

    @property
    def basis(self) -> Basis:
        return Basis(self.p_max, self.m_max)

    @property
    def u_range(self) -> tuple:
        return (self.u_min, self.u_max)

    def caps(self) -> str:
        return (f"basis p<={self.p_max} m<={self.m_max}; u in [{self.u_min}, {self.u_max}];"
                f" deg xi<={self.deg_xi} eta<={self.deg_eta} gauge<={self.deg_gauge}")


@dataclass(frozen=True)
class Symmetry:
    generator: ApproxGenerator
    gauge: GaugeTerm
    label: str = ""

    @property
    def order(self) -> int:
        return self.generator.max_order

    def relabel(self, label: str) -> "Symmetry":
        return Symmetry(self.generator, self.gauge, label)


@dataclass
class Ansatz:
    order: int
    xi: Expr
    eta: Expr
    gauge: Expr
    unknowns: list
    terms: dict  # unknown -> (component, u power, BasisElement)


def build_ansatz(config: SolverConfig, k: int, restricted: bool = False) -> Ansatz:
    """Generic ansatz for (xi_k, eta_k, A_k) with deterministic unknown names.

    ``restricted`` keeps the generator part inside the span of the exact
    generators (unknowns ``d{k}_{h}``) and the gauge generic.
    """
    basis = config.basis.elements
    u = Expr.symbol("u")
    unknowns, terms = [], {}
    parts = {"xi": [], "eta": [], "gauge": []}

    def add(comp, n, elem, name):
        unknowns.append(name)
        terms[name] = (comp, n, elem)
        parts[comp].append(Expr.symbol(name) * u ** n * elem.to_expr())

    if restricted:
        xis, etas = [], []
        for h in range(N_EXACT):
            name = f"d{k}_{h + 1}"
            unknowns.append(name)
            terms[name] = ("exact", h, None)
            sym = Expr.symbol(name)
            xis.append(sym * EXACT_GENERATORS[h][0])
            etas.append(sym * EXACT_GENERATORS[h][1])
        parts["xi"], parts["eta"] = xis, etas
    else:
        for n in range(config.deg_xi + 1):
            for b in basis:
                add("xi", n, b, f"xi{k}_u{n}_{b.name}")
        for n in range(config.deg_eta + 1):
            for b in basis:
                add("eta", n, b, f"eta{k}_u{n}_{b.name}")
    for n in range(config.deg_gauge + 1):
        for b in basis:
            add("gauge", n, b, f"gauge{k}_u{n}_{b.name}")
    return Ansatz(k, sum_exprs(parts["xi"]), sum_exprs(parts["eta"]),
                  sum_exprs(parts["gauge"]), unknowns, terms)


def _value_of(ansatz: Ansatz, comp: str, values: dict) -> Expr:
    u = Expr.symbol("u")
    out = []
    for name, (c, n, elem) in ansatz.terms.items():
        v = values.get(name)
        if v is None:
            continue
        if c == "exact" and comp in ("xi", "eta"):
            g = EXACT_GENERATORS[n][0 if comp == "xi" else 1]
            out.append(v * g)
        elif c == comp:
            out.append(v * u ** n * elem.to_expr())
    return sum_exprs(out)


# ----------------------------------------------------------------------
# coordinates of a solution vector

_IDENT = {
    ("xi", BasisElement(0, 0, 0)): 0,
    ("xi", BasisElement(0, 2, 2)): 1,
    ("xi", BasisElement(0, 1, 2)): 2,
    ("eta", BasisElement(0, 2, 1)): 3,
    ("eta", BasisElement(0, 1, 1)): 4,
    ("A", BasisElement(0, 0, 0)): 5,
}
_COMP_RANK = {"xi": 0, "eta": 1, "A": 2}


def _coord_sort_key(key):
    if key[0] == "c":
        return (0, key[1])
    comp, j, n, elem = key
    ident = _IDENT.get((comp, elem), 99) if n == 0 else 99
    return (1, j, ident, _COMP_RANK[comp], n, elem)


def coordinates(sym: Symmetry, config: SolverConfig, generator_only: bool = False) -> dict:
    """Flattened coefficient vector: key -> Poly in parameters."""
    vec = {}
    for h, c in enumerate(sym.generator.order0, start=1):
        if not c.is_zero:
            vec[("c", h)] = Poly.from_expr(c)
    comps = [("xi", j) for j in range(1, sym.order + 1)] + [("eta", j) for j in range(1, sym.order + 1)]
    if not generator_only:
        comps += [("A", j) for j in range(sym.gauge.max_order + 1)]
    for comp, j in comps:
        if comp == "xi":
            e = sym.generator.xi(j)
        elif comp == "eta":
            e = sym.generator.eta(j)
        else:
            e = sym.gauge.part(j)
        for (n, elem), form in expand_in_basis(e, config.basis, config.u_range).items():
            vec[(comp, j, n, elem)] = Poly.from_expr(form[None])
    return vec


def from_coordinates(vec: dict, order: int) -> Symmetry:
    u = Expr.symbol("u")
    c = [vec[("c", h)].to_expr() if ("c", h) in vec else ZERO for h in range(1, N_EXACT + 1)]
    pieces = {}
    for key, val in vec.items():
        if key[0] == "c":
            continue
        comp, j, n, elem = key
        pieces.setdefault((comp, j), []).append(val.to_expr() * u ** n * elem.to_expr())
    get = lambda comp, j: sum_exprs(pieces.get((comp, j), []))  # noqa: E731
    corr = tuple((get("xi", j), get("eta", j)) for j in range(1, order + 1))
    gauge = tuple(get("A", j) for j in range(order + 1))
    return Symmetry(ApproxGenerator(tuple(c), corr), GaugeTerm(gauge))



def combine(weights: Sequence[Expr], syms: Sequence[Symmetry], order: int) -> Symmetry:
    """sum w_j * sym_j, padded with zero components up to ``order``."""
    c = tuple(sum_exprs(w * s.generator.order0[h] for w, s in zip(weights, syms))
              for h in range(N_EXACT))
    corr = tuple((sum_exprs(w * s.generator.xi(j) for w, s in zip(weights, syms)),
                  sum_exprs(w * s.generator.eta(j) for w, s in zip(weights, syms)))
                 for j in range(1, order + 1))
    gauge = tuple(sum_exprs(w * s.gauge.part(j) for w, s in zip(weights, syms))
                  for j in range(order + 1))
    return Symmetry(ApproxGenerator(c, corr), GaugeTerm(gauge))


# ----------------------------------------------------------------------

@dataclass
class SolutionSpace:
    order: int
    vectors: list
    config: SolverConfig = field(default_factory=SolverConfig)
    exact_c: list = field(default_factory=list)  # basis of E_k (dicts h -> Poly)
    projection_dim: int = 0
    n_new: int = 0
    n_preserved: int = 0
    system_shape: tuple = (0, 0)

    def labelled(self, label: str) -> list:
        return [v for v in self.vectors if v.label == label]

    @property
    def nontrivial(self) -> list:
        return self.labelled(NONTRIVIAL)

    @property
    def exact(self) -> list:
        return self.labelled(EXACT)

    @property
    def trivial(self) -> list:
        return self.labelled(TRIVIAL)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def no_new_symmetry(self) -> bool:
        """True when this order adds no nontrivial generator (reported as zeta)."""
        return self.n_new == 0


def exact_space(config: SolverConfig | None = None) -> SolutionSpace:
    """Order-0 space hard-coded to the five-dimensional Noether basis plus c6."""
    config = config or SolverConfig()
    vecs = [Symmetry(ApproxGenerator.exact(h), GaugeTerm((EXACT_GAUGES[h - 1],)), EXACT)
            for h in range(1, N_EXACT + 1)]
    vecs.append(Symmetry(ApproxGenerator(), GaugeTerm((Expr.const(1),)), TRIVIAL))
    unit = [{h: Poly.const(1)} for h in range(1, N_EXACT + 1)]
    return SolutionSpace(0, vecs, config, exact_c=unit, projection_dim=N_EXACT,
                         n_new=N_EXACT, n_preserved=0)


def _c_vector(sym: Symmetry) -> dict:
    return {h: Poly.from_expr(c) for h, c in enumerate(sym.generator.order0, start=1)
            if not c.is_zero}


_C_COLS = list(range(1, N_EXACT + 1))


def _solve_raw(L: PerturbedLagrangian, prior: SolutionSpace, k: int, config: SolverConfig,
               restricted: bool = False):
    """Null-space vectors at order k (as Symmetry objects) and system shape."""
    ans = build_ansatz(config, k, restricted)
    tnames = [f"t{k}_{j + 1}" for j in range(len(prior.vectors))]
    tsyms = [Expr.symbol(n) for n in tnames]
    combo = combine(tsyms, prior.vectors, k - 1)
    xis = [combo.generator.xi(i) for i in range(k)] + [ans.xi]
    etas = [combo.generator.eta(i) for i in range(k)] + [ans.eta]
    residual = residual_from_parts(L, xis, etas, ans.gauge, k, _Partials(L))
    unknowns = ans.unknowns + tnames
    system = determining_system(residual, unknowns, config.basis, config.u_range)
    null = nullspace(system.poly_rows(), unknowns)
    log.debug("order %d%s: %d rows, %d unknowns, nullity %d", k,
              " (restricted)" if restricted else "", len(system.rows), len(unknowns), len(null))
    out = []
    for vec in null:
        values = {n: p.to_expr() for n, p in vec.items()}
        weights = [values.get(n, ZERO) for n in tnames]
        base = combine(weights, prior.vectors, k)
        gen = base.generator
        corr = list(gen.corrections)
        corr[k - 1] = (_value_of(ans, "xi", values), _value_of(ans, "eta", values))
        gauge = list(base.gauge.parts)
        gauge[k] = _value_of(ans, "gauge", values)
        out.append(Symmetry(ApproxGenerator(gen.order0, tuple(corr)), GaugeTerm(tuple(gauge))))
    return out, (len(system.rows), len(unknowns))


def _solve_order0_generic(config: SolverConfig):
    ans = build_ansatz(config, 0)
    L = PerturbedLagrangian()
    residual = residual_from_parts(L, [ans.xi], [ans.eta], ans.gauge, 0)
    system = determining_system(residual, ans.unknowns, config.basis, config.u_range)
    null = nullspace(system.poly_rows(), ans.unknowns)
    out = []
    for vec in null:
        values = {n: p.to_expr() for n, p in vec.items()}
        xi = _value_of(ans, "xi", values)
        eta = _value_of(ans, "eta", values)
        gauge = _value_of(ans, "gauge", values)
        c = _exact_coefficients(xi, eta, config)
        if c is None:
            raise NoetherError(f"order-0 solution outside the exact Noether basis: {xi}, {eta}")
        out.append(Symmetry(ApproxGenerator(c), GaugeTerm((gauge,))))
    return out, (len(system.rows), len(ans.unknowns))


def _exact_coefficients(xi: Expr, eta: Expr, config: SolverConfig):
    """Coefficients d with (xi, eta) = sum d_h X0^h, or None."""
    basis = config.basis

    def coeff(e, elem):
        for (n, b), form in expand_in_basis(e, basis, config.u_range).items():
            if n == 0 and b == elem:
                return form[None]
        return ZERO

    d = (coeff(xi, BasisElement(0, 0, 0)), coeff(xi, BasisElement(0, 2, 2)),
         coeff(xi, BasisElement(0, 1, 2)), coeff(eta, BasisElement(0, 2, 1)),
         coeff(eta, BasisElement(0, 1, 1)))
    x0, e0, _ = exact_combination(d)
    if x0 == xi and e0 == eta:
        return d
    return None


def _reduce(vec: dict, rows: list, pcols: list, d: Poly) -> dict:
    """Fraction-free reduction of ``vec`` against RREF rows."""
    vec = dict(vec)
    for pc, row in zip(pcols, rows):
        a = vec.get(pc)
        if not a:
            continue
        out = {}
        for key in set(vec) | set(row):
            v = vec.get(key, Poly()) * d - row.get(key, Poly()) * a
            if v:
                out[key] = v
        vec = out
    return vec


def _canonicalize(vectors: list, config: SolverConfig, order: int):
    """RREF of solution vectors over the ordered coordinate list."""
    coords = [coordinates(v, config) for v in vectors]
    cols = sorted({k for c in coords for k in c}, key=_coord_sort_key)
    rows, pcols, d = ff_gauss_jordan(coords, cols)
    rows = [primitive(r, cols) for r in rows]
    return rows, pcols, cols


def _c_rank(cvecs) -> int:
    return rank(cvecs, _C_COLS)


def classify(sym: Symmetry, config: SolverConfig | None = None) -> str:
    """Label a single solution vector (see module docstring)."""
    config = config or SolverConfig()
    if all(c.is_zero for c in sym.generator.order0):
        return TRIVIAL
    for j in range(1, sym.order + 1):
        if _exact_coefficients(sym.generator.xi(j), sym.generator.eta(j), config) is None:
            return NONTRIVIAL
    return EXACT


def _restricted_chain(L, k, config) -> SolutionSpace:
    space = exact_space(config)
    for j in range(1, k + 1):
        raw, shape = _solve_raw(L, space, j, config, restricted=True)
        space = SolutionSpace(j, raw, config)
    return space


def solve_order(L: PerturbedLagrangian, prior: SolutionSpace | None, k: int,
                config: SolverConfig | None = None) -> SolutionSpace:
    """Solve the order-k conditions given the solved space through order k-1.

    With ``k == 0`` and no prior the exact algebra is recomputed from a
    generic ansatz rather than taken from the hard-coded basis.
    """
    config = config or SolverConfig()
    if k == 0:
        raw, shape = _solve_order0_generic(config)
        rows, pcols, cols = _canonicalize(raw, config, 0)
        vecs = []
        for r in rows:
            s = from_coordinates(r, 0)
            vecs.append(s.relabel(classify(s, config)))
        vecs.sort(key=lambda s: s.label != EXACT)
        cvecs = [_c_vector(v) for v in vecs if v.label == EXACT]
        return SolutionSpace(0, vecs, config, exact_c=cvecs, projection_dim=_c_rank(cvecs),
                             n_new=_c_rank(cvecs), system_shape=shape)
    if prior is None or prior.order != k - 1:
        raise NoetherError(f"order {k} must be solved after order {k - 1}")

    raw, shape = _solve_raw(L, prior, k, config)
    rows, pcols, cols = _canonicalize(raw, config, k)
    c_rows = [r for r, pc in zip(rows, pcols) if pc[0] == "c"]
    t_rows = [r for r, pc in zip(rows, pcols) if pc[0] != "c"]

    # exact directions E_k from the restricted chain, reduced modulo the lifts
    restricted = _restricted_chain(L, k, config)
    r_rows, r_pcols, _ = _canonicalize(restricted.vectors, config, k)
    t_red, t_pcols, t_d = ff_gauss_jordan(t_rows, cols)
    exact_vecs = []
    for r, pc in zip(r_rows, r_pcols):
        if pc[0] == "c":
            exact_vecs.append(primitive(_reduce(r, t_red, t_pcols, t_d), cols))
    exact_c = [{key[1]: v for key, v in r.items() if key[0] == "c"} for r in exact_vecs]

    picked, basis_c = [], list(exact_c)
    for r in c_rows:
        cv = {key[1]: v for key, v in r.items() if key[0] == "c"}
        if _c_rank(basis_c + [cv]) > _c_rank(basis_c):
            basis_c.append(cv)
            picked.append(r)

    vecs = ([from_coordinates(r, k).relabel(EXACT) for r in exact_vecs]
            + [from_coordinates(r, k).relabel(NONTRIVIAL) for r in picked]
            + [from_coordinates(r, k).relabel(TRIVIAL) for r in t_rows])

    proj = [{key[1]: v for key, v in r.items() if key[0] == "c"} for r in c_rows]
    dim_proj = _c_rank(proj)
    dim_e = _c_rank(exact_c)
    dim_prev_e = _c_rank(prior.exact_c)
    dim_inter = dim_prev_e + dim_proj - _c_rank(prior.exact_c + proj)
    return SolutionSpace(k, vecs, config, exact_c=exact_c, projection_dim=dim_proj,
                         n_new=dim_inter - dim_e, n_preserved=dim_proj - dim_inter,
                         system_shape=shape)


def solve(L: PerturbedLagrangian, max_order: int, config: SolverConfig | None = None) -> list:
    """Sequential solve; returns the spaces for orders 0..max_order."""
    config = config or SolverConfig()
    spaces = [exact_space(config)]
    for k in range(1, max_order + 1):
        spaces.append(solve_order(L, spaces[-1], k, config))
    return spaces


# ----------------------------------------------------------------------
# single-generator helpers

def find_gauge(L: PerturbedLagrangian, X: ApproxGenerator, k: int,
               config: SolverConfig | None = None) -> Expr | None:
    """Gauge part ``A_k`` (gauge constant zero) making the order-k residual vanish."""
    config = config or SolverConfig()
    ans = build_ansatz(config, k)
    gauge_names = [n for n in ans.unknowns if ans.terms[n][0] == "gauge"]
    xis = [X.xi(i) for i in range(k + 1)]
    etas = [X.eta(i) for i in range(k + 1)]
    residual = residual_from_parts(L, xis, etas, ans.gauge, k)
    system = determining_system(residual, gauge_names, config.basis, config.u_range,
                                allow_inhomogeneous=True)
    one = "__one__"
    rows = [{(one if u is None else u): Poly.from_expr(v) for u, v in r.items()}
            for r in system.rows]
    cols = gauge_names + [one]
    for vec in nullspace(rows, cols):
        if one in vec:
            scale = vec[one]
            values = {}
            for n in gauge_names:
                if n in vec:
                    q = exact_div(vec[n], scale)
                    if q is None:
                        raise NoetherError("gauge coefficients are not polynomial in the parameters")
                    values[n] = q.to_expr()
            return _value_of(ans, "gauge", values)
    return None


def gauge_for(L: PerturbedLagrangian, X: ApproxGenerator, order: int,
              config: SolverConfig | None = None) -> GaugeTerm | None:
    """Gauge through ``order`` for a given generator, or None if X is not a symmetry."""
    parts = []
    for k in range(order + 1):
        a = find_gauge(L, X, k, config)
        if a is None:
            return None
        parts.append(a)
    return GaugeTerm(tuple(parts))


def generator_in_span(X: ApproxGenerator, space: SolutionSpace,
                      labels: Sequence[str] | None = None) -> bool:
    """Exact membership of X's generator coefficients in the span of the space."""
    config = space.config
    pool = [v for v in space.vectors if labels is None or v.label in labels]
    target = Symmetry(X, GaugeTerm((ZERO,)))
    vecs = [coordinates(v, config, generator_only=True) for v in pool]
    tv = coordinates(_pad(target, space.order), config, generator_only=True)
    cols = sorted({k for c in vecs + [tv] for k in c}, key=_coord_sort_key)
    return rank(vecs + [tv], cols) == rank(vecs, cols)


def _pad(sym: Symmetry, order: int) -> Symmetry:
    corr = tuple(sym.generator.corrections) + ((ZERO, ZERO),) * (order - sym.order)
    return Symmetry(ApproxGenerator(sym.generator.order0, corr[:order]), sym.gauge, sym.label)
