import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxnoether import Expr, diff_partial, eval_numeric, parse, substitute
from approxnoether.noether import (EXACT_GAUGES, EXACT_GENERATORS, ApproxGenerator, GaugeTerm,
                                   HigherOrderEquation, NoetherError, PerturbedLagrangian,
                                   SequentialOrderError, acceleration, euler_lagrange,
                                   is_higher_order, is_symmetry, prolong, residual_order_k)
from approxnoether.separate import collect_jet

ORBIT = PerturbedLagrangian.from_strings(G1="-u/(2*ell^2) - u^3/2")
QUAD = PerturbedLagrangian.from_strings(G1="(1/2)*a0*u^2 + a1*u + a2")
GUP = PerturbedLagrangian.from_strings(G1="-(1/2)*upp^2")
FREE = PerturbedLagrangian()


def _random_points(e, n=20, seed=0):
    rng = random.Random(seed)
    names = set(e.parameters()) | {"phi", "u", "up", "upp", "uppp"}
    for _ in range(n):
        at = {v: rng.uniform(0.5, 2.0) for v in names}
        yield at


# ----- order 0 ----------------------------------------------------------

@pytest.mark.parametrize("h", range(1, 6))
def test_exact_generators_are_noether_symmetries(h):
    X = ApproxGenerator.exact(h)
    A = GaugeTerm((EXACT_GAUGES[h - 1],))
    assert residual_order_k(FREE, X, A, 0).is_zero


def test_translation_generator_needs_its_gauge():
    X = ApproxGenerator.exact(4)
    r = residual_order_k(FREE, X, GaugeTerm(), 0)
    assert r == parse("u*sin(phi) - up*cos(phi)")
    assert collect_jet(r) == {(0, 0, 0): parse("u*sin(phi)"), (1, 0, 0): parse("-cos(phi)")}
    assert residual_order_k(FREE, X, GaugeTerm(("-u*cos(phi)",)), 0).is_zero


def test_missing_components_are_rejected():
    with pytest.raises(SequentialOrderError):
        residual_order_k(ORBIT, ApproxGenerator.exact(4), GaugeTerm(("-u*cos(phi)",)), 1)


# ----- prolongation -----------------------------------------------------

def test_prolong_examples():
    eta1, eta2 = prolong(Expr(), parse("sin(phi)"), 1)
    assert eta1 == parse("cos(phi)") and eta2 is None
    xi, eta = EXACT_GENERATORS[1]
    eta1, _ = prolong(xi, eta, 1)
    assert eta1 == parse("-up*cos(2*phi) - 2*u*sin(2*phi)")


def test_second_prolongation_structure():
    eta = parse("u^3*phi + u*sin(2*phi)")
    _, eta2 = prolong(Expr(), eta, 2)
    up, upp = parse("up"), parse("upp")
    e_u = diff_partial(eta, "u")
    expected = (diff_partial(e_u, "u") * up * up + 2 * diff_partial(e_u, "phi") * up
                + diff_partial(diff_partial(eta, "phi"), "phi") + e_u * upp)
    assert eta2 == expected


def test_prolong_rejects_jet_dependence():
    with pytest.raises(NoetherError):
        prolong(parse("up"), Expr())


# ----- order-1 worked examples ------------------------------------------

def test_orbital_first_order_generators():
    X1 = ApproxGenerator.exact(5).with_correction("2*sin(phi)", "u*cos(phi)")
    A1 = GaugeTerm(("u*sin(phi)", "(1/2)*u^2*sin(phi) - (1/2)*ell^(-2)*sin(phi)"))
    assert is_symmetry(ORBIT, X1, A1, 1)
    X2 = ApproxGenerator.exact(4).with_correction("-2*cos(phi)", "u*sin(phi)")
    A2 = GaugeTerm(("-u*cos(phi)", "-(1/2)*u^2*cos(phi) + (1/2)*ell^(-2)*cos(phi)"))
    assert is_symmetry(ORBIT, X2, A2, 1)


def test_orbital_gauge_matches_reference_slice():
    # reference first-order gauge restricted to its c4 and c5 directions
    reference = parse("(1/(2*ell^2))*((-c4*u^2*ell^2 + c4)*cos(phi) + (c5*u^2*ell^2 - c5)*sin(phi))")
    c4 = substitute(reference, {"c4": 1, "c5": 0})
    c5 = substitute(reference, {"c4": 0, "c5": 1})
    assert c4 == parse("-(1/2)*u^2*cos(phi) + (1/2)*ell^(-2)*cos(phi)")
    assert c5 == parse("(1/2)*u^2*sin(phi) - (1/2)*ell^(-2)*sin(phi)")


def test_trivial_lift_of_time_translation():
    X = ApproxGenerator().with_correction("1", "0")
    A = GaugeTerm(("0", "0"))
    assert is_symmetry(QUAD, X, A, 1)


def test_quadratic_translation_lift():
    X = ApproxGenerator.exact(4).with_correction("0", "(1/2)*a0*phi*cos(phi) - (1/4)*a0*sin(phi)")
    A = GaugeTerm(("-u*cos(phi)",
                   "(1/4)*((2*c5*phi - c4)*a0*u - 4*c4*a1)*cos(phi)"
                   " + (1/4)*(2*c4*phi + c5)*a0*u*sin(phi)"))
    A = GaugeTerm((A.parts[0], substitute(A.parts[1], {"c4": 1, "c5": 0})))
    assert is_symmetry(QUAD, X, A, 1)


def test_zero_residuals_vanish_numerically():
    X = ApproxGenerator.exact(5).with_correction("2*sin(phi)", "u*cos(phi)")
    A = GaugeTerm(("u*sin(phi)", "(1/2)*u^2*sin(phi) - (1/2)*ell^(-2)*sin(phi)"))
    raw = (X.eta(1) * diff_partial(parse("-u/(2*ell^2) - u^3/2"), "u"))
    assert not raw.is_zero
    r = residual_order_k(ORBIT, X, A, 1)
    assert r.is_zero
    for at in _random_points(raw):
        assert abs(eval_numeric(r, at)) <= 1e-10


# ----- equation of motion -----------------------------------------------

def test_oscillation_equation():
    assert euler_lagrange(FREE, 0) == parse("upp + u")
    assert euler_lagrange(ORBIT, 0) == parse("upp + u")


def test_orbital_equation_of_motion():
    el = euler_lagrange(ORBIT, 1)
    eps = Expr.symbol("eps")
    assert el == parse("upp + u") - eps * parse("1/(2*ell^2) + (3/2)*u^2")
    # eps = 2M turns the right-hand side into M/ell^2 + 3*M*u^2
    rhs = substitute(parse("upp + u") - el, {"eps": parse("2*m")})
    assert rhs == parse("m*ell^(-2) + 3*m*u^2")
    assert acceleration(ORBIT, 1) == parse("-u") + eps * parse("1/(2*ell^2) + (3/2)*u^2")


def test_charged_equation_of_motion_second_order():
    L = PerturbedLagrangian.from_strings(
        G1="-u/(2*ell^2) - u^3/2",
        G2="kappa*u^2/(2*ell^2) + kappa*u^4/2 - rho*u^(-2)/(2*ell^2)")
    F = acceleration(L, 2)
    eps = Expr.symbol("eps")
    expected = (parse("-u") + eps * parse("1/(2*ell^2) + (3/2)*u^2")
                - eps ** 2 * parse("kappa*u/ell^2 + 2*kappa*u^3 + rho/(ell^2*u^3)"))
    assert F == expected


def test_minimal_length_equation_is_fourth_order():
    el = euler_lagrange(GUP, 1)
    assert is_higher_order(el)
    assert el == parse("upp + u") - Expr.symbol("eps") * parse("upppp")
    with pytest.raises(HigherOrderEquation):
        acceleration(GUP, 1)
    assert not is_higher_order(euler_lagrange(GUP, 0))


def test_velocity_dependent_acceleration_reduces_upp():
    L = PerturbedLagrangian.from_strings(G1="u*up^2")
    # E(G1) = up^2 - D(2 u up) = -up^2 - 2 u upp ; upp -> -u at first order
    F = acceleration(L, 1)
    assert F == parse("-u") + Expr.symbol("eps") * parse("up^2 - 2*u^2")


def test_lagrangian_validation():
    with pytest.raises(NoetherError):
        PerturbedLagrangian.from_strings(G1="phi*u")
    with pytest.raises(NoetherError):
        PerturbedLagrangian.from_strings(G1="uppp")
    with pytest.raises(NoetherError):
        PerturbedLagrangian.from_strings(G1="eps*u")


# ----- linearity --------------------------------------------------------

coeffs = st.lists(st.integers(-3, 3), min_size=5, max_size=5)


@settings(max_examples=50, deadline=None)
@given(coeffs, coeffs)
def test_order0_residual_is_linear(a, b):
    def r(c):
        return residual_order_k(FREE, ApproxGenerator(tuple(c)), GaugeTerm(), 0)
    assert r([x + y for x, y in zip(a, b)]) == r(a) + r(b)


corrections = st.sampled_from(["0", "u", "u*sin(phi)", "phi*u^2", "cos(2*phi)", "u^3*phi"])


@settings(max_examples=50, deadline=None)
@given(corrections, corrections, corrections, corrections)
def test_order1_residual_is_linear(x1, e1, x2, e2):
    def gen(xi, eta):
        return ApproxGenerator().with_correction(xi, eta)
    Z = GaugeTerm(("0", "0"))
    both = ApproxGenerator().with_correction(parse(x1) + parse(x2), parse(e1) + parse(e2))
    lhs = residual_order_k(ORBIT, both, Z, 1)
    rhs = residual_order_k(ORBIT, gen(x1, e1), Z, 1) + residual_order_k(ORBIT, gen(x2, e2), Z, 1)
    assert lhs == rhs


# ----- derived residual versus the reference first-order condition --------

C = [parse(f"c{h}") for h in range(1, 6)]
XI1 = parse("u*sin(phi) + phi*cos(2*phi)")
ETA1 = parse("u^2*cos(phi) + phi*u")
A1 = parse("u^2*sin(2*phi) + phi*u")


def _reference_order1(G1: Expr) -> Expr:
    """The reference first-order condition, with its blocks joined by '+'."""
    sin, cos = parse("sin(phi)"), parse("cos(phi)")
    u, up = parse("u"), parse("up")
    c2, c3, c4, c5 = C[1:]
    G, Gu, Gup = G1, diff_partial(G1, "u"), diff_partial(G1, "up")
    d = lambda e, v: diff_partial(e, v)  # noqa: E731
    line1 = (d(ETA1, "phi") + up * d(ETA1, "u") - up * d(XI1, "phi") - up * up * d(XI1, "u")) \
        * (-up) + ETA1 * u
    line2 = (-2 * sin * cos * c3 * u + 2 * c2 * u * cos * cos + c4 * sin + c5 * cos - c2 * u) * Gu
    line3 = (-4 * c2 * u * cos * sin + 2 * sin * cos * c3 * up - 2 * cos * cos * c2 * up) * Gup
    line4 = (-4 * cos * cos * c3 * u - c5 * sin + c4 * cos + c2 * up + 2 * c3 * u) * Gup
    geometric = (2 * c2 * parse("cos(2*phi)") - 2 * c3 * parse("sin(2*phi)")) * G \
        + (d(XI1, "phi") + up * d(XI1, "u")) * parse("-(1/2)*up^2 + (1/2)*u^2")
    gauge = d(A1, "phi") + up * d(A1, "u")
    return line1 + line2 + line3 + line4 + geometric - gauge


def _derived_order1(G1: Expr) -> Expr:
    L = PerturbedLagrangian(G1, parameters=(("g", None),))
    X = ApproxGenerator(tuple(C)).with_correction(XI1, ETA1)
    A = GaugeTerm((Expr(), A1))
    return residual_order_k(L, X, A, 1)


@pytest.mark.parametrize("a", [-2, -1, 0, 1, 2, 3, 4])
def test_reference_condition_power_class(a):
    G1 = parse(f"g*u^{a}") if a >= 0 else parse(f"g*u^({a})")
    assert _derived_order1(G1) == _reference_order1(G1)


@pytest.mark.parametrize("a, b", [(0, 1), (1, 1), (2, 2), (-1, 2), (3, 1), (1, 3)])
def test_reference_condition_velocity_class(a, b):
    G1 = parse(f"g*u^({a})*up^{b}")
    assert _derived_order1(G1) == _reference_order1(G1)


def test_reference_second_prolongation_block_signs():
    # the u'' block of the reference condition should equal eta0^[2]; it does once the
    # leading minus of the last bracket is read as acting on its first term only
    sin, cos = parse("sin(phi)"), parse("cos(phi)")
    u, upp = parse("u"), parse("upp")
    c2, c3, c4, c5 = C[1:]
    X = ApproxGenerator(tuple(C))
    _, eta2 = prolong(X.xi(0), X.eta(0), 2)
    first = 8 * sin * cos * c3 * u + 6 * sin * cos * c3 * upp - 8 * c2 * u * cos * cos
    literal = first - (6 * cos * cos * c2 * upp - c4 * sin - c5 * cos + 4 * c2 * u + 3 * c2 * upp)
    corrected = first - 6 * cos * cos * c2 * upp - c4 * sin - c5 * cos + 4 * c2 * u + 3 * c2 * upp
    assert eta2 == corrected
    assert eta2 != literal
