"""Quadratic perturbation G1 = a0 u^2/2 + a1 u + a2.

Four exact generators pick up secular first-order corrections.  The script
solves the determining system, then checks a hand-written generator.
"""
from approxnoether import print_canonical
from approxnoether.integrals import first_integral
from approxnoether.noether import ApproxGenerator, PerturbedLagrangian
from approxnoether.solve import gauge_for, generator_in_span, solve

L = PerturbedLagrangian.from_strings(G1="(1/2)*a0*u^2 + a1*u + a2")
spaces = solve(L, 1)
one = spaces[1]
print(f"order 1: {len(one.nontrivial)} nontrivial, {len(one.trivial)} trivial lifts")

for v in one.nontrivial:
    print("  xi1 =", print_canonical(v.generator.xi(1)), "| eta1 =", print_canonical(v.generator.eta(1)))

# a correction to the generator sin(phi) d/du with a secular term
X = ApproxGenerator.exact(4).with_correction("0", "(1/2)*a0*phi*cos(phi) - (1/4)*a0*sin(phi)")
print("hand-written generator in the solved span:", generator_in_span(X, one))
I = first_integral(L, X, gauge_for(L, X, 1), 1)
print("its integral:", I)
