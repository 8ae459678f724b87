"""Case files and the built-in Lagrangians.

A case file is flat structured text: ``[section]`` headers followed by
``key = value`` lines.  Expressions use the package grammar; numbers in the
``verify`` section may carry a ``*pi`` suffix.

    [case]
    label = schwarzschild

    [lagrangian]
    G1 = -(1/2)*ell^(-2)*u - (1/2)*u^3

    [parameters]
    ell = 2

    [solver]
    order = 1

    [verify]
    eps = 0.001, 0.0005
"""
from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .expr import ExprError
from .noether import EPS, PerturbedLagrangian
from .parser import parse
from .solve import SolverConfig


class CaseError(ExprError):
    """Malformed or inconsistent case file."""


@dataclass(frozen=True)
class VerifyConfig:
    eps: tuple = (1e-3, 5e-4)
    u0: float = 1.0
    up0: float = 0.0
    phi_end: str = "20*pi"
    h: float = 1e-3

    @property
    def phi_end_value(self) -> float:
        return _number(self.phi_end)


@dataclass(frozen=True)
class CaseFile:
    label: str
    G1: str = "0"
    G2: str = "0"
    G3: str = "0"
    parameters: tuple = ()  # ((name, default text or ""), ...)
    order: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    description: str = ""

    def __post_init__(self):
        gs = [parse(g) for g in (self.G1, self.G2, self.G3)]
        declared = {n for n, _ in self.parameters}
        for i, g in enumerate(gs, start=1):
            missing = set(g.parameters()) - declared
            if missing:
                raise CaseError(f"G{i} uses undeclared parameters: {', '.join(sorted(missing))}")
        if gs[0].is_zero and any(not g.is_zero for g in gs[1:]):
            raise CaseError("G1 must be nonzero when a higher-order perturbation is given")
        if not 1 <= self.order <= 3:
            raise CaseError(f"order must be 1..3, got {self.order}")
        for name, _ in self.parameters:
            if name == EPS:
                raise CaseError(f"{EPS!r} is reserved for the perturbation parameter")

    def lagrangian(self) -> PerturbedLagrangian:
        params = tuple((n, Fraction(v) if v else None) for n, v in self.parameters)
        return PerturbedLagrangian.from_strings(self.G1, self.G2, self.G3, params, self.label)

    def parameter_values(self) -> dict:
        out = {}
        for name, v in self.parameters:
            if not v:
                raise CaseError(f"parameter {name!r} has no numeric default")
            out[name] = float(Fraction(v))
        return out


def _number(text: str) -> float:
    t = text.replace(" ", "")
    if t.endswith("*pi"):
        return float(Fraction(t[:-3])) * math.pi
    if t == "pi":
        return math.pi
    return float(Fraction(t))


# ----------------------------------------------------------------------

_SOLVER_KEYS = ("basis_p", "basis_m", "u_min", "u_max", "deg_xi", "deg_eta", "deg_gauge")
_SOLVER_FIELDS = ("p_max", "m_max", "u_min", "u_max", "deg_xi", "deg_eta", "deg_gauge")


def _new_parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                   comment_prefixes=("#",), inline_comment_prefixes=None)
    cp.optionxform = str
    return cp


def loads(text: str) -> CaseFile:
    cp = _new_parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise CaseError(f"case file: {exc}") from None
    known = {"case", "lagrangian", "parameters", "solver", "verify"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise CaseError(f"unknown sections: {', '.join(sorted(unknown))}")
    if not cp.has_option("case", "label"):
        raise CaseError("missing [case] label")
    get = lambda s, k, d: cp.get(s, k, fallback=d).strip()  # noqa: E731
    try:
        lag = {k: get("lagrangian", k, "0") for k in ("G1", "G2", "G3")}
        if cp.has_section("lagrangian"):
            extra = set(cp.options("lagrangian")) - set(lag)
            if extra:
                raise CaseError(f"unknown keys in [lagrangian]: {', '.join(sorted(extra))}")
        params = tuple((k, v.strip()) for k, v in cp.items("parameters")) \
            if cp.has_section("parameters") else ()
        solver = SolverConfig(**{f: int(get("solver", k, str(getattr(SolverConfig, f))))
                                 for k, f in zip(_SOLVER_KEYS, _SOLVER_FIELDS)})
        vd = VerifyConfig()
        eps = get("verify", "eps", "")
        verify = VerifyConfig(
            eps=tuple(float(x) for x in eps.split(",")) if eps else vd.eps,
            u0=float(get("verify", "u0", str(vd.u0))),
            up0=float(get("verify", "up0", str(vd.up0))),
            phi_end=get("verify", "phi_end", vd.phi_end),
            h=float(get("verify", "h", str(vd.h))))
        verify.phi_end_value
        case = CaseFile(label=get("case", "label", ""), description=get("case", "description", ""),
                        G1=lag["G1"], G2=lag["G2"], G3=lag["G3"], parameters=params,
                        order=int(get("solver", "order", "1")), solver=solver, verify=verify)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ExprError):
            raise
        raise CaseError(f"case file: {exc}") from None
    return case


def load(path) -> CaseFile:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(case: CaseFile) -> str:
    """Deterministic text form; ``loads(dumps(c)) == c``."""
    out = io.StringIO()
    w = out.write
    w("[case]\n")
    w(f"label = {case.label}\n")
    if case.description:
        w(f"description = {case.description}\n")
    w("\n[lagrangian]\n")
    for k in ("G1", "G2", "G3"):
        w(f"{k} = {getattr(case, k)}\n")
    if case.parameters:
        w("\n[parameters]\n")
        for n, v in case.parameters:
            w(f"{n} = {v}\n" if v else f"{n} =\n")
    w("\n[solver]\n")
    w(f"order = {case.order}\n")
    for k, f in zip(_SOLVER_KEYS, _SOLVER_FIELDS):
        w(f"{k} = {getattr(case.solver, f)}\n")
    v = case.verify
    w("\n[verify]\n")
    w(f"eps = {', '.join(repr(e) for e in v.eps)}\n")
    w(f"u0 = {v.u0!r}\nup0 = {v.up0!r}\nphi_end = {v.phi_end}\nh = {v.h!r}\n")
    return out.getvalue()


# ----------------------------------------------------------------------
# built-in cases

_ORBIT_G1 = "-u/(2*ell^2) - u^3/2"

BUILTINS = {
    "unperturbed": CaseFile(
        "unperturbed", description="harmonic oscillator with no perturbation"),
    "quadratic": CaseFile(
        "quadratic", G1="(1/2)*a0*u^2 + a1*u + a2",
        parameters=(("a0", "1/2"), ("a1", "1/3"), ("a2", "1")),
        description="quadratic polynomial perturbation"),
    "gup": CaseFile(
        "gup", G1="-(1/2)*upp^2",
        description="reduced Klein-Gordon equation with a minimal-length correction"
                    " (eps = -2*beta*h^2, V0 = 1)"),
    "orbital": CaseFile(
        "orbital", G1=_ORBIT_G1,
        G2="kappa*u^2/(2*ell^2) + kappa*u^4/2 - rho*u^(-2)/(2*ell^2)",
        parameters=(("ell", "2"), ("kappa", "1"), ("rho", "0")), order=2,
        description="planetary orbit equation with mass, charge and expansion terms"
                    " (eps = 2M, kappa*eps^2 = Q^2, rho*eps^2 = H^2)"),
    "schwarzschild": CaseFile(
        "schwarzschild", G1=_ORBIT_G1, parameters=(("ell", "2"),),
        description="orbit equation, mass term only (eps = 2M)"),
    "reissner-nordstrom": CaseFile(
        "reissner-nordstrom", G1=_ORBIT_G1, G2="kappa*u^2/(2*ell^2) + kappa*u^4/2",
        parameters=(("ell", "2"), ("kappa", "1")), order=2,
        description="orbit equation with charge (kappa*eps^2 = Q^2)"),
    "bardeen": CaseFile(
        "bardeen", G1=_ORBIT_G1, G3="3*k*u^5/4 + 3*k*u^3/(4*ell^2)",
        parameters=(("ell", "2"), ("k", "1")), order=3,
        description="orbit equation of a regular black hole, third-order correction"),
}


def resolve(name_or_path: str) -> CaseFile:
    """A built-in by name, else a case file path."""
    if name_or_path in BUILTINS:
        return BUILTINS[name_or_path]
    p = Path(name_or_path)
    if not p.is_file():
        raise CaseError(f"no built-in case or file named {name_or_path!r}"
                        f" (built-ins: {', '.join(BUILTINS)})")
    return load(p)


def with_solver(case: CaseFile, **overrides) -> CaseFile:
    """Replace solver caps (None values are ignored)."""
    fields = {k: v for k, v in overrides.items() if v is not None}
    return replace(case, solver=replace(case.solver, **fields)) if fields else case


__all__ = ["CaseFile", "VerifyConfig", "CaseError", "BUILTINS", "load", "loads", "dumps",
           "resolve", "with_solver"]
