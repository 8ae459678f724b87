"""Command-line front end.

    approxnoether conditions CASE --order K
    approxnoether solve CASE [--order K]
    approxnoether verify CASE [--export FILE]
    approxnoether list-builtins

CASE is a built-in name or a case-file path.  Exit codes: 0 success,
2 input error, 3 basis overflow, 4 verification refused.
"""
from __future__ import annotations

import argparse
import sys

from .cases import BUILTINS, CaseError, resolve, with_solver
from .expr import ExprError
from .integrals import HigherOrderLagrangianError
from .report import (conditions_document, render_conditions, render_solve, render_verify,
                     solve_document, to_machine, verify_document)
from .separate import BasisOverflow
from .verify import VerificationRefused, integrate_el, write_delimited

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_OVERFLOW = 3
EXIT_REFUSED = 4


def _add_caps(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver caps (override the case file)")
    g.add_argument("--basis-p", type=int, help="maximum power of phi in the basis")
    g.add_argument("--basis-m", type=int, help="maximum trig multiple in the basis")
    g.add_argument("--u-min", type=int, help="lowest power of u accepted")
    g.add_argument("--u-max", type=int, help="highest power of u accepted")
    g.add_argument("--deg-xi", type=int, help="u-degree of the xi ansatz")
    g.add_argument("--deg-eta", type=int, help="u-degree of the eta ansatz")
    g.add_argument("--deg-gauge", type=int, help="u-degree of the gauge ansatz")
    p.add_argument("--format", choices=("text", "machine"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="approxnoether",
        description="Approximate Noether symmetries of perturbed oscillator Lagrangians.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("conditions", help="print the order-k residual for a generic generator")
    p.add_argument("case")
    p.add_argument("--order", type=int, required=True)
    _add_caps(p)

    p = sub.add_parser("solve", help="solve the determining equations order by order")
    p.add_argument("case")
    p.add_argument("--order", type=int, help="highest order (default: from the case)")
    _add_caps(p)

    p = sub.add_parser("verify", help="check conservation of the integrals numerically")
    p.add_argument("case")
    p.add_argument("--export", metavar="FILE",
                   help="write the first-eps trajectory and integrals as comma-separated text")
    _add_caps(p)

    sub.add_parser("list-builtins", help="list the built-in cases")
    return ap


def _case(args):
    case = resolve(args.case)
    return with_solver(case, p_max=args.basis_p, m_max=args.basis_m, u_min=args.u_min,
                       u_max=args.u_max, deg_xi=args.deg_xi, deg_eta=args.deg_eta,
                       deg_gauge=args.deg_gauge)


def _check_order(k: int) -> None:
    if not 0 <= k <= 3:
        raise CaseError(f"order must be between 0 and 3, got {k}")


def _emit(doc, render, fmt, out) -> None:
    out.write(to_machine(doc) if fmt == "machine" else render(doc))


def _export(case, doc, spaces, path) -> None:
    from .integrals import first_integral
    from .solve import TRIVIAL

    L = case.lagrangian()
    vc = case.verify
    k = case.order
    t = integrate_el(L, k, vc.eps[0], case.parameter_values(), vc.u0, vc.up0,
                     vc.phi_end_value, vc.h)
    ints = {}
    for i, v in enumerate([v for v in spaces[k].vectors if v.label != TRIVIAL], start=1):
        ints[f"I{k}.{i}"] = first_integral(L, v.generator, v.gauge, k)
    with open(path, "w", encoding="utf-8") as fh:
        write_delimited(t, fh, ints)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-builtins":
            for name, case in BUILTINS.items():
                out.write(f"{name:<20} order {case.order}  {case.description}\n")
            return EXIT_OK
        case = _case(args)
        if args.command == "conditions":
            _check_order(args.order)
            _emit(conditions_document(case, args.order), render_conditions, args.format, out)
        elif args.command == "solve":
            k = case.order if args.order is None else args.order
            _check_order(k)
            _emit(solve_document(case, k), render_solve, args.format, out)
        else:
            from .solve import solve

            L = case.lagrangian()
            if L.depends_on_upp():
                raise VerificationRefused(
                    f"case {case.label!r} depends on u''; its equation of motion is fourth order"
                    " and no first-integral formula exists for such Lagrangians,"
                    " so numeric verification is refused")
            spaces = solve(L, case.order, case.solver)
            doc = verify_document(case, spaces)
            _emit(doc, render_verify, args.format, out)
            if args.export:
                _export(case, doc, spaces, args.export)
    except (VerificationRefused, HigherOrderLagrangianError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except BasisOverflow as exc:
        print(f"basis overflow: {exc}; enlarge the caps (--basis-p, --basis-m, --u-min,"
              " --u-max, --deg-*)", file=sys.stderr)
        return EXIT_OVERFLOW
    except (ExprError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
