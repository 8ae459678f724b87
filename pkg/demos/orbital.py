"""Orbit equation with first- and second-order corrections.

Solves to order 2, prints the two new first-order integrals, and measures
how their drift along a numerical orbit scales with eps.
"""
import math

from approxnoether.cases import BUILTINS
from approxnoether.integrals import first_integral
from approxnoether.verify import conservation_drift, integrate_el
from approxnoether.solve import solve

case = BUILTINS["orbital"]
L = case.lagrangian()
params = case.parameter_values()
spaces = solve(L, case.order, case.solver)

for sp in spaces[1:]:
    print(f"order {sp.order}: new {sp.n_new}, zeta {sp.no_new_symmetry}")

for v in spaces[1].nontrivial:
    I = first_integral(L, v.generator, v.gauge, 1)
    drifts, control = [], []
    for eps in (1e-3, 5e-4):
        t = integrate_el(L, 1, eps, params, 1.0, 0.0, 20 * math.pi, 1e-3)
        drifts.append(conservation_drift(I, t)[0])
        control.append(conservation_drift(I.truncated(0), t)[0])
    print(I)
    print(f"  drift ratio {drifts[0] / drifts[1]:.2f} (expect ~4);"
          f" exact part alone {control[0] / control[1]:.2f} (expect ~2)")
