"""Perturbed Lagrangians, the exact Noether basis and order-k residuals.

The Lagrangian is ``L0 + eps*G1 + eps^2*G2 + eps^3*G3`` with the fixed
oscillator part ``L0 = (u^2 - up^2)/2``.  The invariance residual at order
``k`` is the ``eps^k`` coefficient of ``X^[2] L + (D xi) L - D A``; a
generator/gauge pair is an approximate symmetry through order ``k`` when
all residuals up to ``k`` vanish identically.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .expr import (JETS, ZERO, Expr, ExprError, diff_partial, sum_exprs,
                   total_derivative)
from .parser import parse

EPS = "eps"
MAX_ORDER = 3

L0 = parse("(1/2)*u^2 - (1/2)*up^2")


class NoetherError(ExprError):
    pass


class HigherOrderEquation(NoetherError):
    """The Euler-Lagrange equation is beyond second order (u''-dependent G)."""


class SequentialOrderError(NoetherError):
    """Lower-order generator or gauge components are missing."""


def _check_perturbation(g: Expr, name: str) -> None:
    if g.depends_on_phi():
        raise NoetherError(f"{name} must not depend on phi: {g}")
    for params, jets, _, _ in (k for k, _ in g.items()):
        if jets[3] or jets[4]:
            raise NoetherError(f"{name} depends on derivatives above u'': {g}")
        if jets[1] < 0 or jets[2] < 0:
            raise NoetherError(f"{name} has negative powers of u' or u'': {g}")
        if any(n == EPS for n, _ in params):
            raise NoetherError(f"{name} must not contain the symbol {EPS!r}")


@dataclass(frozen=True)
class PerturbedLagrangian:
    G1: Expr = ZERO
    G2: Expr = ZERO
    G3: Expr = ZERO
    parameters: tuple = ()  # ((name, default Fraction | None), ...)
    label: str = ""

    def __post_init__(self):
        for i, g in enumerate((self.G1, self.G2, self.G3), start=1):
            _check_perturbation(g, f"G{i}")

    @classmethod
    def from_strings(cls, G1="0", G2="0", G3="0", parameters=(), label=""):
        return cls(parse(G1), parse(G2), parse(G3), tuple(parameters), label)

    def component(self, j: int) -> Expr:
        """``L0`` for j = 0, ``Gj`` for j = 1..3, zero beyond."""
        if j == 0:
            return L0
        if 1 <= j <= MAX_ORDER:
            return (self.G1, self.G2, self.G3)[j - 1]
        return ZERO

    def perturbations(self) -> tuple:
        return (self.G1, self.G2, self.G3)

    def depends_on_upp(self, order: int = MAX_ORDER) -> bool:
        return any(self.component(j).has("upp") for j in range(1, order + 1))

    def full(self, order: int = MAX_ORDER) -> Expr:
        eps = Expr.symbol(EPS)
        return sum_exprs(eps ** j * self.component(j) for j in range(order + 1))

    def substitute_parameters(self, values) -> "PerturbedLagrangian":
        from .expr import substitute

        gs = [substitute(g, values) for g in self.perturbations()]
        keep = tuple(p for p in self.parameters if p[0] not in values)
        return PerturbedLagrangian(*gs, parameters=keep, label=self.label)


# ----------------------------------------------------------------------
# exact Noether algebra of L0

EXACT_GENERATORS = tuple((parse(xi), parse(eta)) for xi, eta in (
    ("1", "0"),
    ("sin(2*phi)", "u*cos(2*phi)"),
    ("cos(2*phi)", "-u*sin(2*phi)"),
    ("0", "sin(phi)"),
    ("0", "cos(phi)"),
))
# A0 slice per generator; the gauge constant c6 is handled as its own direction.
EXACT_GAUGES = tuple(parse(a) for a in (
    "0", "u^2*sin(2*phi)", "u^2*cos(2*phi)", "-u*cos(phi)", "u*sin(phi)",
))
EXACT_INTEGRALS = tuple(parse(i) for i in (
    "(1/2)*(u^2 + up^2)",
    "(1/2)*(up^2 - u^2)*sin(2*phi) - u*up*cos(2*phi)",
    "(1/2)*(up^2 - u^2)*cos(2*phi) + u*up*sin(2*phi)",
    "-up*sin(phi) + u*cos(phi)",
    "-up*cos(phi) - u*sin(phi)",
))
N_EXACT = len(EXACT_GENERATORS)


def exact_combination(coeffs: Sequence) -> tuple[Expr, Expr, Expr]:
    """(xi0, eta0, A0 slice) for coefficients over the exact basis."""
    coeffs = [Expr.const(c) if not isinstance(c, Expr) else c for c in coeffs]
    xi = sum_exprs(c * g[0] for c, g in zip(coeffs, EXACT_GENERATORS))
    eta = sum_exprs(c * g[1] for c, g in zip(coeffs, EXACT_GENERATORS))
    gauge = sum_exprs(c * a for c, a in zip(coeffs, EXACT_GAUGES))
    return xi, eta, gauge


@dataclass(frozen=True)
class ApproxGenerator:
    """``X = X0 + eps X1 + ...`` with X0 given over the exact basis."""

    order0: tuple = field(default_factory=lambda: (ZERO,) * N_EXACT)
    corrections: tuple = ()  # ((xi_k, eta_k) for k = 1..max_order)

    def __post_init__(self):
        c = tuple(x if isinstance(x, Expr) else Expr.const(x) for x in self.order0)
        if len(c) != N_EXACT:
            raise NoetherError(f"order0 needs {N_EXACT} coefficients")
        object.__setattr__(self, "order0", c)
        for xi, eta in self.corrections:
            for f in (xi, eta):
                if f.max_jet_order() > 0:
                    raise NoetherError(f"generator coefficient depends on derivatives: {f}")

    @classmethod
    def exact(cls, h: int, scale=1) -> "ApproxGenerator":
        """The h-th exact generator (1-based)."""
        c = [0] * N_EXACT
        c[h - 1] = scale
        return cls(tuple(c))

    @property
    def max_order(self) -> int:
        return len(self.corrections)

    def xi(self, k: int) -> Expr:
        if k == 0:
            return exact_combination(self.order0)[0]
        return self.corrections[k - 1][0] if k <= self.max_order else ZERO

    def eta(self, k: int) -> Expr:
        if k == 0:
            return exact_combination(self.order0)[1]
        return self.corrections[k - 1][1] if k <= self.max_order else ZERO

    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.order0) and all(
            xi.is_zero and eta.is_zero for xi, eta in self.corrections)

    def with_correction(self, xi, eta) -> "ApproxGenerator":
        xi = parse(xi) if isinstance(xi, str) else xi
        eta = parse(eta) if isinstance(eta, str) else eta
        return ApproxGenerator(self.order0, self.corrections + ((xi, eta),))


@dataclass(frozen=True)
class GaugeTerm:
    parts: tuple = (ZERO,)  # A_0, A_1, ...

    def __post_init__(self):
        parts = tuple(parse(p) if isinstance(p, str) else p for p in self.parts)
        object.__setattr__(self, "parts", parts)
        for a in parts:
            if a.max_jet_order() > 0:
                raise NoetherError(f"gauge depends on derivatives: {a}")

    @property
    def max_order(self) -> int:
        return len(self.parts) - 1

    def part(self, k: int) -> Expr:
        return self.parts[k] if k < len(self.parts) else ZERO


def exact_gauge(order0) -> Expr:
    return exact_combination(order0)[2]


# ----------------------------------------------------------------------
# prolongation and residuals

def prolong(xi: Expr, eta: Expr, depth: int = 2):
    """Prolonged coefficients ``(eta1, eta2)``; ``eta2`` is None for depth 1."""
    for f in (xi, eta):
        if f.max_jet_order() > 0:
            raise NoetherError(f"point generator expected, got coefficient {f}")
    dxi = total_derivative(xi)
    up = Expr.symbol("up")
    eta1 = total_derivative(eta) - up * dxi
    if depth == 1:
        return eta1, None
    eta2 = total_derivative(eta1) - Expr.symbol("upp") * dxi
    return eta1, eta2


class _Partials:
    """Cached partial derivatives of each Lagrangian component."""

    def __init__(self, L: PerturbedLagrangian):
        self.L = L
        self.cache = {}

    def get(self, j):
        if j not in self.cache:
            c = self.L.component(j)
            self.cache[j] = (c, diff_partial(c, "u"), diff_partial(c, "up"),
                             diff_partial(c, "upp"))
        return self.cache[j]


def residual_from_parts(L: PerturbedLagrangian, xis: Sequence[Expr], etas: Sequence[Expr],
                        gauge_k: Expr, k: int, partials: _Partials | None = None) -> Expr:
    """Order-k residual from explicit per-order coefficients ``xis[i], etas[i]``."""
    partials = partials or _Partials(L)
    terms = []
    for i in range(k + 1):
        Lj, Lu, Lup, Lupp = partials.get(k - i)
        if Lj.is_zero:
            continue
        xi, eta = xis[i], etas[i]
        if xi.is_zero and eta.is_zero:
            continue
        eta1, eta2 = prolong(xi, eta, 2 if not Lupp.is_zero else 1)
        terms.append(eta * Lu)
        terms.append(eta1 * Lup)
        if eta2 is not None:
            terms.append(eta2 * Lupp)
        terms.append(total_derivative(xi) * Lj)
    terms.append(-total_derivative(gauge_k))
    return sum_exprs(terms)


def residual_order_k(L: PerturbedLagrangian, X: ApproxGenerator, A: GaugeTerm, k: int) -> Expr:
    """eps^k coefficient of ``X^[2]L + (D xi) L - D A`` (zero iff the condition holds)."""
    if not 0 <= k <= MAX_ORDER:
        raise NoetherError(f"order {k} outside 0..{MAX_ORDER}")
    if X.max_order < k or A.max_order < k:
        raise SequentialOrderError(
            f"order-{k} residual needs generator and gauge components through order {k}"
            f" (have {X.max_order} and {A.max_order})")
    xis = [X.xi(i) for i in range(k + 1)]
    etas = [X.eta(i) for i in range(k + 1)]
    return residual_from_parts(L, xis, etas, A.part(k), k)


def is_symmetry(L, X, A, order: int) -> bool:
    return all(residual_order_k(L, X, A, j).is_zero for j in range(order + 1))


# ----------------------------------------------------------------------
# equations of motion

def euler_operator(f: Expr) -> Expr:
    """``f_u - D f_up + D^2 f_upp``."""
    out = diff_partial(f, "u") - total_derivative(diff_partial(f, "up"))
    fupp = diff_partial(f, "upp")
    if not fupp.is_zero:
        out = out + total_derivative(total_derivative(fupp))
    return out


def euler_lagrange(L: PerturbedLagrangian, order: int) -> Expr:
    """Equation-of-motion residual ``upp + u + sum eps^i E(G_i)``, truncated.

    For u''-dependent perturbations the result contains ``uppp``/``upppp``;
    :func:`is_higher_order` flags it and :func:`acceleration` refuses it.
    """
    eps = Expr.symbol(EPS)
    parts = [euler_operator(L0)]
    for i in range(1, order + 1):
        g = L.component(i)
        if not g.is_zero:
            parts.append(eps ** i * euler_operator(g))
    return sum_exprs(parts)


def is_higher_order(el: Expr) -> bool:
    return el.has("uppp") or el.has("upppp")


def acceleration(L: PerturbedLagrangian, order: int) -> Expr:
    """``F`` with ``u'' = F(phi, u, u', eps)`` solving the EL equation to ``eps^order``."""
    from .expr import substitute, truncate

    el = euler_lagrange(L, order)
    if is_higher_order(el):
        raise HigherOrderEquation(
            "Euler-Lagrange equation is of order four; no second-order solved form")
    # el = upp + u + eps*R(u, up, upp); iterate upp = -u - eps*R(upp).
    rest = el - Expr.symbol("upp") - Expr.symbol("u")
    F = -Expr.symbol("u")
    for _ in range(order):
        F = truncate(-Expr.symbol("u") - substitute(rest, {"upp": F}), EPS, order)
    return F


__all__ = [
    "EPS", "L0", "PerturbedLagrangian", "ApproxGenerator", "GaugeTerm",
    "EXACT_GENERATORS", "EXACT_GAUGES", "EXACT_INTEGRALS", "exact_combination",
    "prolong", "residual_order_k", "residual_from_parts", "euler_lagrange",
    "acceleration", "is_higher_order", "HigherOrderEquation", "JETS",
]
