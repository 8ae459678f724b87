import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from approxnoether import Expr, parse
from approxnoether.expr import ExprError
from approxnoether.noether import (ApproxGenerator, GaugeTerm, PerturbedLagrangian,
                                   residual_from_parts, residual_order_k)
from approxnoether.separate import (Basis, BasisElement, BasisOverflow, collect_jet,
                                    determining_system, expand_in_basis)
from approxnoether.solve import SolverConfig, build_ansatz

ORBIT = PerturbedLagrangian.from_strings(G1="-u/(2*ell^2) - u^3/2")
QUAD = PerturbedLagrangian.from_strings(G1="(1/2)*a0*u^2 + a1*u + a2")
GUP = PerturbedLagrangian.from_strings(G1="-(1/2)*upp^2")
FREE = PerturbedLagrangian()


def _generic_order1(L, config=SolverConfig()):
    ans = build_ansatz(config, 1)
    cs = tuple(Expr.symbol(f"c{h}") for h in range(1, 6))
    X0 = ApproxGenerator(cs)
    r = residual_from_parts(L, [X0.xi(0), ans.xi], [X0.eta(0), ans.eta], ans.gauge, 1)
    return r, [f"c{h}" for h in range(1, 6)] + ans.unknowns


def test_collect_jet_translation():
    r = residual_order_k(FREE, ApproxGenerator.exact(4), GaugeTerm(), 0)
    assert collect_jet(r) == {(0, 0, 0): parse("u*sin(phi)"), (1, 0, 0): parse("-cos(phi)")}
    assert collect_jet(Expr()) == {}


def test_collect_jet_minimal_length_residual():
    r, _ = _generic_order1(GUP)
    keys = collect_jet(r)
    assert max(k[1] for k in keys) == 2
    # eta^[2] carries at most u'' and multiplies G1_upp = -upp, so no u''' slot arises
    assert all(k[2] == 0 for k in keys)


@pytest.mark.parametrize("L", [FREE, QUAD, ORBIT, GUP], ids=["free", "quad", "orbit", "gup"])
def test_collect_jet_partition(L):
    r, _ = _generic_order1(L)
    parts = collect_jet(r)
    total = Expr()
    for (b, c, d), coeff in parts.items():
        total = total + coeff * parse("up") ** b * parse("upp") ** c * parse("uppp") ** d
    assert total == r


def test_expand_in_basis_secular_term():
    out = expand_in_basis(parse("a0*phi*cos(2*phi)*u"), Basis(1, 2))
    assert out == {(1, BasisElement(1, 1, 2)): {None: parse("a0")}}
    assert expand_in_basis(Expr(), Basis()) == {}


def test_expand_in_basis_overflow():
    with pytest.raises(BasisOverflow):
        expand_in_basis(parse("cos(phi)^3*u"), Basis(1, 2))
    out = expand_in_basis(parse("cos(phi)^3*u"), Basis(1, 3))
    assert set(out) == {(1, BasisElement(0, 1, 3)), (1, BasisElement(0, 1, 1))}
    with pytest.raises(BasisOverflow):
        expand_in_basis(parse("phi^2*u"), Basis(1, 2))
    with pytest.raises(BasisOverflow):
        expand_in_basis(parse("u^7"), Basis(1, 2))


def test_expand_linear_forms():
    out = expand_in_basis(parse("(2*x1 + a0*x2)*u*sin(phi) + x1"), Basis(), unknowns={"x1", "x2"})
    assert out[(1, BasisElement(0, 2, 1))] == {"x1": parse("2"), "x2": parse("a0")}
    assert out[(0, BasisElement(0, 0, 0))] == {"x1": parse("1")}


def test_nonlinear_residual_rejected():
    with pytest.raises(ExprError):
        determining_system(parse("x1*x2*u"), ["x1", "x2"], Basis())


def test_inhomogeneous_rejected_by_default():
    with pytest.raises(ExprError):
        determining_system(parse("x1*u + 1"), ["x1"], Basis())
    s = determining_system(parse("x1*u + 1"), ["x1"], Basis(), allow_inhomogeneous=True)
    assert s.inhomogeneous


@pytest.mark.parametrize("L", [FREE, QUAD, ORBIT, GUP], ids=["free", "quad", "orbit", "gup"])
def test_reconstruction_and_provenance(L):
    r, unknowns = _generic_order1(L)
    cfg = SolverConfig()
    s = determining_system(r, unknowns, cfg.basis, cfg.u_range)
    assert s.reconstruct() == r
    assert len(set(s.provenance)) == len(s.provenance)
    for row in s.rows:
        assert None not in row and row


def test_duplicate_rows_are_dropped():
    s = determining_system(parse("x1*u + 2*x1*u^2*sin(phi)"), ["x1"], Basis())
    assert len(s.rows) == 1
    assert len(s.entries) == 2


def test_to_text_dump():
    s = determining_system(parse("x1*u - x2*u + x2*up*cos(phi)"), ["x1", "x2"], Basis())
    text = s.to_text()
    assert text.splitlines()[0] == "# unknowns: x1 x2"
    assert "(0,0,0,1,one) : 1 -1" in text
    assert "(1,0,0,0,cosphi) : 0 1" in text


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.integers(1, 5))
def test_basis_audit_full_rank(p, m):
    assert Basis(p, m).audit()


def test_basis_size():
    assert len(Basis(1, 2)) == 10
    assert [e.name for e in Basis(0, 1).elements] == ["one", "cosphi", "sinphi"]
