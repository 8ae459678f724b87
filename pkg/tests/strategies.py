"""Hypothesis strategies for random expressions."""
from fractions import Fraction

from hypothesis import strategies as st

from approxnoether.expr import Expr

PARAMS = ("a0", "ell")

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
nonzero_fractions = fractions.filter(bool)


@st.composite
def monomials(draw, negative_u=True, jets=("u", "up", "upp"), trig=True):
    e = Expr.const(draw(nonzero_fractions))
    for name in PARAMS:
        n = draw(st.integers(-1 if name == "ell" else 0, 2))
        if n:
            e = e * Expr.symbol(name) ** n
    for name in jets:
        lo = -2 if (name == "u" and negative_u) else 0
        n = draw(st.integers(lo, 3 if name == "u" else 2))
        if n:
            e = e * Expr.symbol(name) ** n
    if draw(st.booleans()):
        e = e * Expr.symbol("phi")
    if trig:
        kind = draw(st.sampled_from(["", "sin", "cos"]))
        if kind:
            e = e * Expr.trig(kind, draw(st.integers(1, 3)))
    return e


@st.composite
def exprs(draw, max_terms=5, **kw):
    """Canonical expression as a sum of random monomials (possibly zero)."""
    terms = draw(st.lists(monomials(**kw), max_size=max_terms))
    out = Expr()
    for t in terms:
        out = out + t
    return out


@st.composite
def composite_exprs(draw, **kw):
    """Products and powers of sums, to exercise trig product reduction."""
    a = draw(exprs(max_terms=3, **kw))
    b = draw(exprs(max_terms=3, **kw))
    n = draw(st.integers(0, 2))
    return a * b + draw(exprs(max_terms=2, **kw)) ** n


points = st.fixed_dictionaries({
    "phi": st.floats(-3, 3),
    "u": st.floats(0.3, 2.0) | st.floats(-2.0, -0.3),
    "up": st.floats(-2, 2),
    "upp": st.floats(-2, 2),
    "a0": st.floats(-2, 2),
    "ell": st.floats(0.5, 3),
})

__all__ = ["monomials", "exprs", "composite_exprs", "points", "fractions", "Fraction"]
