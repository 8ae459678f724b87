import pytest

from approxnoether import parse
from approxnoether.linalg import rank
from approxnoether.noether import (ApproxGenerator, GaugeTerm, NoetherError, PerturbedLagrangian,
                                   residual_order_k)
from approxnoether.solve import (EXACT, NONTRIVIAL, TRIVIAL, SolverConfig, Symmetry, build_ansatz,
                                 classify, coordinates, exact_space, gauge_for, generator_in_span,
                                 solve, solve_order)

QUAD = PerturbedLagrangian.from_strings(G1="(1/2)*a0*u^2 + a1*u + a2")
ORBIT = PerturbedLagrangian.from_strings(G1="-u/(2*ell^2) - u^3/2")
GUP = PerturbedLagrangian.from_strings(G1="-(1/2)*upp^2")
FREE = PerturbedLagrangian()

QUAD_GENERATORS = {
    # secular generators; the a1 term of the first one sits in the u-component
    "M": ApproxGenerator.exact(2).with_correction(
        "a0*phi*cos(2*phi) - a0*sin(2*phi)",
        "-((1/2)*a0*u*cos(2*phi) + a0*phi*u*sin(2*phi) - a1*cos(2*phi))"),
    "N": ApproxGenerator.exact(3).with_correction(
        "-(1/2)*a0*cos(2*phi) - phi*a0*sin(2*phi)",
        "-(phi*a0*u*cos(2*phi) + a1*sin(2*phi))"),
    "O": ApproxGenerator.exact(4).with_correction(
        "0", "(1/2)*a0*phi*cos(phi) - (1/4)*a0*sin(phi)"),
    "P": ApproxGenerator.exact(5).with_correction(
        "0", "-((1/4)*a0*cos(phi) + (1/2)*phi*a0*sin(phi))"),
}


@pytest.fixture(scope="module")
def quad_spaces():
    return solve(QUAD, 1)


@pytest.fixture(scope="module")
def orbit_spaces():
    return solve(ORBIT, 2)


def _back_substitute(L, spaces):
    for sp in spaces:
        for v in sp.vectors:
            for j in range(sp.order + 1):
                assert residual_order_k(L, v.generator, v.gauge, j).is_zero


def test_ansatz_counts():
    ans = build_ansatz(SolverConfig(), 1)
    xi = [n for n in ans.unknowns if n.startswith("xi1_")]
    assert len(xi) == 2 * 10
    assert "eta1_u1_phicos2phi" in ans.unknowns
    assert "gauge1_u2_cos2phi" in ans.unknowns
    assert len(set(ans.unknowns)) == len(ans.unknowns)


def test_exact_space_from_generic_ansatz():
    sp = solve_order(FREE, None, 0)
    assert len(sp.exact) == 5
    assert sp.projection_dim == 5
    _back_substitute(FREE, [sp])
    # the generic solve and the hard-coded basis span the same generators
    hard = exact_space()
    for v in hard.exact:
        assert generator_in_span(v.generator, sp)


def test_unperturbed_first_order_is_lifts_only():
    spaces = solve(FREE, 1)
    sp = spaces[1]
    assert sp.nontrivial == []
    assert len(sp.exact) == 5
    # five lifts eps*X0^h plus the gauge constants of orders 0 and 1
    assert len(sp.trivial) == 7
    assert sp.dim == 12
    _back_substitute(FREE, spaces)


def test_quadratic_first_order(quad_spaces):
    sp = quad_spaces[1]
    assert len(sp.nontrivial) == 4
    assert sp.n_new == 4
    _back_substitute(QUAD, quad_spaces)


@pytest.mark.parametrize("name", "MNOP")
def test_quadratic_generators_in_span(quad_spaces, name):
    X = QUAD_GENERATORS[name]
    assert gauge_for(QUAD, X, 1) is not None
    assert generator_in_span(X, quad_spaces[1])


def test_quadratic_span_is_exactly_the_four(quad_spaces):
    sp = quad_spaces[1]
    cfg = sp.config
    pool = [v for v in sp.vectors if v.label != NONTRIVIAL]
    ours = [Symmetry(X, GaugeTerm()) for X in QUAD_GENERATORS.values()]
    vecs = [coordinates(v, cfg, generator_only=True) for v in pool + ours]
    theirs = [coordinates(v, cfg, generator_only=True) for v in pool + sp.nontrivial]
    cols = sorted({k for c in vecs + theirs for k in c}, key=str)
    r = rank(theirs, cols)
    assert rank(vecs, cols) == r == rank(vecs + theirs, cols)


def test_reference_quadratic_generator_is_not_a_symmetry():
    literal = ApproxGenerator.exact(2).with_correction(
        "a0*phi*cos(2*phi) - a0*sin(2*phi) - 2*cos(phi)^2*a1 + a1",
        "-((1/2)*a0*u*cos(2*phi) + u*a0*phi*sin(2*phi))")
    assert gauge_for(QUAD, literal, 1) is None


def test_minimal_length_case_has_no_nontrivial():
    spaces = solve(GUP, 1)
    assert spaces[1].nontrivial == []
    assert spaces[1].no_new_symmetry
    _back_substitute(GUP, spaces)


def test_orbital_first_and_second_order(orbit_spaces):
    one, two = orbit_spaces[1], orbit_spaces[2]
    assert len(one.nontrivial) == 2 and one.n_new == 2
    assert two.n_new == 0 and two.no_new_symmetry
    _back_substitute(ORBIT, orbit_spaces)


def test_orbital_generators_in_span(orbit_spaces):
    X1 = ApproxGenerator.exact(5).with_correction("2*sin(phi)", "u*cos(phi)")
    X2 = ApproxGenerator.exact(4).with_correction("-2*cos(phi)", "u*sin(phi)")
    for X in (X1, X2):
        assert generator_in_span(X, orbit_spaces[1])


def test_reference_orbital_labels_are_swapped():
    reference = ApproxGenerator.exact(4).with_correction("2*sin(phi)", "u*cos(phi)")
    assert gauge_for(ORBIT, reference, 1) is None


def test_classify_examples():
    lift = Symmetry(ApproxGenerator().with_correction("1", "0"), GaugeTerm(("0", "0")))
    assert classify(lift) == TRIVIAL
    gauge_only = Symmetry(ApproxGenerator(), GaugeTerm(("1",)))
    assert classify(gauge_only) == TRIVIAL
    X1 = ApproxGenerator.exact(5).with_correction("2*sin(phi)", "u*cos(phi)")
    assert classify(Symmetry(X1, GaugeTerm())) == NONTRIVIAL
    shifted = ApproxGenerator.exact(5).with_correction("0", "3*sin(phi)")
    assert classify(Symmetry(shifted, GaugeTerm())) == EXACT


def test_determinism():
    a = solve(QUAD, 1)[1]
    b = solve(QUAD, 1)[1]
    assert [(v.label, v.generator, v.gauge) for v in a.vectors] == \
           [(v.label, v.generator, v.gauge) for v in b.vectors]


def test_sequential_rule():
    with pytest.raises(NoetherError):
        solve_order(ORBIT, exact_space(), 2)


def test_gauge_for_rejects_non_symmetry():
    X = ApproxGenerator.exact(4).with_correction("u", "0")
    assert gauge_for(ORBIT, X, 1) is None


def test_vectors_are_linearly_independent(quad_spaces):
    sp = quad_spaces[1]
    vecs = [coordinates(v, sp.config) for v in sp.vectors]
    cols = sorted({k for c in vecs for k in c}, key=str)
    assert rank(vecs, cols) == len(vecs)


def test_special_parameter_value_is_a_separate_run():
    # with a0 = 0 only the dilation-type generators pick up corrections
    L = PerturbedLagrangian.from_strings(G1="a1*u + a2")
    spaces = solve(L, 1)
    sp = spaces[1]
    assert len(sp.nontrivial) == 2
    assert sorted(v.generator.order0.index(parse("1")) for v in sp.nontrivial) == [1, 2]
    _back_substitute(L, spaces)
