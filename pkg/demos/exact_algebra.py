"""The unperturbed oscillator: five Noether generators and their integrals.

Run with ``python demos/exact_algebra.py``.
"""
from approxnoether import print_canonical
from approxnoether.integrals import conservation_check_symbolic, first_integral
from approxnoether.noether import ApproxGenerator, PerturbedLagrangian
from approxnoether.solve import gauge_for, solve_order

L = PerturbedLagrangian()

# solve the order-0 conditions from a generic ansatz
space = solve_order(L, None, 0)
print(f"solution dimension {space.dim}, exact generators {len(space.exact)}")

for h in range(1, 6):
    X = ApproxGenerator.exact(h)
    A = gauge_for(L, X, 0)
    I = first_integral(L, X, A, 0)
    assert conservation_check_symbolic(I, L, 0).is_zero
    print(f"X0^{h}: xi = {print_canonical(X.xi(0))}, eta = {print_canonical(X.eta(0))}")
    print(f"      gauge {print_canonical(A.part(0))}; integral {print_canonical(I.part(0))}")
