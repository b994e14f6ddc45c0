"""The delta-symbol expansion reproduces the indicator of n = 0.

For each integer n the expansion sums over moduli q <= 2Q the Ramanujan sum
c_q(n) against an integral of the weight g(q, x).  The result should be 1 at
n = 0 and 0 elsewhere, to quadrature accuracy.
"""

from rankin_delta.delta_symbol import DeltaParams, delta_expansion, verify_delta

for Q in (50, 100):
    p = DeltaParams(Q)
    vals = {n: delta_expansion(n, p) for n in (0, 1, 2, 7, 25)}
    print(f"Q = {Q}: " + ", ".join(f"n={n}: {v:+.3e}" for n, v in vals.items()))
    rep = verify_delta((-25, 25), p)
    print(f"  max |expansion - delta| over |n| <= 25: {rep.residuals['max_error']:.2e}")
