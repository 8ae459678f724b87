"""Report documents for the command-line front end.

Every report is first built as a plain dict (the machine form, emitted as
sorted JSON) and the text form is rendered from that dict, so both formats
always carry the same content.
"""
from __future__ import annotations

import json
import math

from .cases import CaseFile
from .expr import Expr, print_canonical
from .integrals import first_integral
from .noether import (EXACT_GAUGES, N_EXACT, ApproxGenerator, PerturbedLagrangian,
                      residual_from_parts)
from .separate import collect_jet, determining_system
from .solve import NONTRIVIAL, TRIVIAL, Symmetry, build_ansatz, solve
from .verify import conservation_drift, integrate_el

FLOOR = 1e-11


def format_order0(c) -> str:
    parts = []
    for h, coef in enumerate(c, start=1):
        if coef.is_zero:
            continue
        s = print_canonical(coef)
        if s == "1":
            s = ""
        elif s == "-1":
            s = "-"
        elif len(coef) > 1:
            s = f"({s})*"
        else:
            s += "*"
        parts.append(f"{s}X0^{h}")
    if not parts:
        return "0"
    return " + ".join(parts).replace("+ -", "- ")


def _symmetry_doc(sym: Symmetry, L: PerturbedLagrangian, k: int) -> dict:
    gen = sym.generator
    doc = {
        "label": sym.label,
        "order0": [print_canonical(c) for c in gen.order0],
        "order0_text": format_order0(gen.order0),
        "corrections": [{"xi": print_canonical(gen.xi(j)), "eta": print_canonical(gen.eta(j))}
                        for j in range(1, k + 1)],
        "gauge": [print_canonical(sym.gauge.part(j)) for j in range(k + 1)],
    }
    if L.depends_on_upp(k):
        doc["integral"] = None
    else:
        I = first_integral(L, gen, sym.gauge, k)
        doc["integral"] = [print_canonical(p) for p in I.parts]
    return doc


def _caps(case: CaseFile) -> dict:
    s = case.solver
    return {"basis_p": s.p_max, "basis_m": s.m_max, "u_min": s.u_min, "u_max": s.u_max,
            "deg_xi": s.deg_xi, "deg_eta": s.deg_eta, "deg_gauge": s.deg_gauge}


def solve_document(case: CaseFile, max_order: int, spaces=None) -> dict:
    L = case.lagrangian()
    spaces = spaces or solve(L, max_order, case.solver)
    orders = []
    carried = 0
    for sp in spaces:
        listed = [v for v in sp.vectors if v.label != TRIVIAL]
        entry = {
            "order": sp.order,
            "system": list(sp.system_shape),
            "dimension": sp.dim,
            "projection": sp.projection_dim,
            "new": sp.n_new,
            "extended": sp.n_preserved,
            "retained": carried,
            "trivial_lifts": len(sp.trivial),
            "symmetries": [_symmetry_doc(v, L, sp.order) for v in listed],
        }
        if sp.order == 0:
            entry["verdict"] = "exact Noether algebra"
        elif sp.n_new:
            entry["verdict"] = f"{sp.n_new} new nontrivial approximate symmetries"
        else:
            entry["verdict"] = "zeta: no nontrivial approximate symmetry at this order"
        if sp.order >= 1:
            carried += len(sp.nontrivial)
        orders.append(entry)
    return {
        "case": case.label,
        "lagrangian": {"G1": case.G1, "G2": case.G2, "G3": case.G3},
        "caps": _caps(case),
        "max_order": max_order,
        "first_integrals": not L.depends_on_upp(max_order),
        "orders": orders,
    }


def render_solve(doc: dict) -> str:
    out = [f"case: {doc['case']}"]
    for k in ("G1", "G2", "G3"):
        out.append(f"  {k} = {doc['lagrangian'][k]}")
    caps = doc["caps"]
    out.append(f"caps: basis p<={caps['basis_p']} m<={caps['basis_m']};"
               f" u in [{caps['u_min']}, {caps['u_max']}];"
               f" deg xi<={caps['deg_xi']} eta<={caps['deg_eta']} gauge<={caps['deg_gauge']}")
    if not doc["first_integrals"]:
        out.append("first integrals: not available (Lagrangian depends on u'')")
    for o in doc["orders"]:
        out.append("")
        k = o["order"]
        head = f"order {k}: {o['verdict']}"
        out.append(head)
        if k:
            out.append(f"  system {o['system'][0]} rows x {o['system'][1]} unknowns;"
                       f" solution dimension {o['dimension']}; trivial lifts {o['trivial_lifts']}")
            out.append(f"  surviving exact directions {o['projection']}; new {o['new']};"
                       f" lower-order nontrivial retained {o['retained']},"
                       f" extended to this order {o['extended']}")
        for i, s in enumerate(o["symmetries"], start=1):
            out.append(f"  [{k}.{i}] {s['label']}: X0 = {s['order0_text']}")
            for j, c in enumerate(s["corrections"], start=1):
                out.append(f"        xi{j} = {c['xi']}")
                out.append(f"        eta{j} = {c['eta']}")
            for j, a in enumerate(s["gauge"]):
                out.append(f"        A{j} = {a}")
            if s["integral"] is not None:
                for j, p in enumerate(s["integral"]):
                    out.append(f"        I{j} = {p}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------

def conditions_document(case: CaseFile, k: int) -> dict:
    """Order-k residual for a generic generator, collected by jet monomial."""
    L = case.lagrangian()
    cs = [Expr.symbol(f"c{h}") for h in range(1, N_EXACT + 1)]
    gen = ApproxGenerator(tuple(cs))
    xis, etas = [gen.xi(0)], [gen.eta(0)]
    gauge_k = None
    unknowns = list(f"c{h}" for h in range(1, N_EXACT + 1))
    for j in range(1, k + 1):
        ans = build_ansatz(case.solver, j)
        xis.append(ans.xi)
        etas.append(ans.eta)
        unknowns += ans.unknowns
        gauge_k = ans.gauge
    if k == 0:
        gauge_k = sum((c * a for c, a in zip(cs, EXACT_GAUGES)), Expr()) + Expr.symbol("c6")
        unknowns.append("c6")
    residual = residual_from_parts(L, xis, etas, gauge_k, k)
    slots = []
    for key, coeff in sorted(collect_jet(residual).items()):
        slots.append({"jet": list(key), "coefficient": print_canonical(coeff)})
    system = determining_system(residual, unknowns, case.solver.basis, case.solver.u_range)
    return {"case": case.label, "order": k, "caps": _caps(case), "slots": slots,
            "rows": len(system.rows), "unknowns": len(unknowns),
            "jet_symbols": sorted({s for s in ("upp", "uppp") if residual.has(s)})}


def _slot_name(jet) -> str:
    names = ("up", "upp", "uppp")
    f = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, jet) if e]
    return "*".join(f) or "1"


def render_conditions(doc: dict) -> str:
    out = [f"case: {doc['case']}", f"order {doc['order']} residual, generic generator",
           f"determining system: {doc['rows']} rows x {doc['unknowns']} unknowns"]
    for s in doc["slots"]:
        out.append(f"[{_slot_name(s['jet'])}]")
        out.append(f"  {s['coefficient']}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------

def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.6e}"


def verify_document(case: CaseFile, spaces=None) -> dict:
    L = case.lagrangian()
    params = case.parameter_values()
    vc = case.verify
    spaces = spaces or solve(L, case.order, case.solver)
    trajectories = {}

    def traj(k, eps):
        if (k, eps) not in trajectories:
            trajectories[(k, eps)] = integrate_el(L, k, eps, params, vc.u0, vc.up0,
                                                  vc.phi_end_value, vc.h)
        return trajectories[(k, eps)]

    rows = []
    for sp in spaces[1:]:
        k = sp.order
        for i, v in enumerate([v for v in sp.vectors if v.label != TRIVIAL], start=1):
            I = first_integral(L, v.generator, v.gauge, k)
            for name, J, expo in ((f"{k}.{i}", I, k + 1), (f"{k}.{i} exact part", I.truncated(0), 1)):
                if expo == 1 and v.label != NONTRIVIAL:
                    continue
                drifts = [conservation_drift(J, traj(k, e))[0] for e in vc.eps]
                ratio = None
                if len(drifts) >= 2 and drifts[1] > FLOOR:
                    ratio = drifts[0] / drifts[1]
                rows.append({"integral": name, "label": v.label, "order": k,
                             "drift": drifts, "ratio": ratio,
                             "expected_ratio": (vc.eps[0] / vc.eps[1]) ** expo
                             if len(vc.eps) >= 2 else None})
    return {"case": case.label, "eps": list(vc.eps), "u0": vc.u0, "up0": vc.up0,
            "phi_end": vc.phi_end, "h": vc.h, "method": "rk4", "parameters": params,
            "rows": rows}


def render_verify(doc: dict) -> str:
    out = [f"case: {doc['case']}",
           f"rk4 h={doc['h']} phi in [0, {doc['phi_end']}], u0={doc['u0']}, up0={doc['up0']}",
           "parameters: " + (", ".join(f"{k}={v}" for k, v in sorted(doc["parameters"].items()))
                             or "none")]
    eps_cols = "  ".join(f"drift(eps={e:g})" for e in doc["eps"])
    out.append(f"{'integral':<20} {'label':<11} {eps_cols}  ratio  expected")
    for r in doc["rows"]:
        d = "  ".join(f"{_fmt(x):>{len(f'drift(eps={e:g})')}}" for x, e in zip(r["drift"], doc["eps"]))
        ratio = "floor" if r["ratio"] is None else f"{r['ratio']:.3f}"
        exp = "n/a" if r["expected_ratio"] is None else f"{r['expected_ratio']:.3g}"
        out.append(f"{r['integral']:<20} {r['label']:<11} {d}  {ratio}  {exp}")
    return "\n".join(out) + "\n"


def to_machine(doc: dict) -> str:
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return repr(x)
        return x
    return json.dumps(doc, sort_keys=True, indent=2, default=clean) + "\n"


__all__ = ["solve_document", "render_solve", "conditions_document", "render_conditions",
           "verify_document", "render_verify", "to_machine", "format_order0"]
