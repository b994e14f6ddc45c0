"""Stationary phase versus brute-force quadrature.

For a quadratic phase with a stationary point inside the support, the
truncated expansion error shrinks like a power of lambda, faster at
higher order.
"""

from rankin_delta.oscillatory import PhaseFunction, oscillatory_quadrature, stationary_phase_expansion
from rankin_delta.weights import bump

w = bump(1.0, 2.0)
for lam in (1e2, 1e3, 1e4):
    h = PhaseFunction.quadratic(lam, 1.5, Y0=lam)
    exact = oscillatory_quadrature(w, h, tol=1e-13)
    for order in (1, 2):
        approx = stationary_phase_expansion(w, h, order)
        print(f"lambda {lam:7.0f}, order {order}: relative error {abs(approx - exact) / abs(exact):.2e}")
