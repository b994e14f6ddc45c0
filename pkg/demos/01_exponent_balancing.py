"""Where the subconvexity exponents come from.

Each error term in the final bound is a power of T whose exponent is affine in
the free parameter kappa.  The optimal kappa is the minimax point of the upper
envelope of those lines.  Everything below is exact rational arithmetic.
"""

from fractions import Fraction

from rankin_delta.exponent_calculus import crossover_nu, theorem1_bound, theorem2_bound, theorem2_regime_formulas

print("Generic point t_f ~ t_g ~ t ~ T")
b = theorem1_bound()
print("  undominated error terms (exponent of T as a function of kappa):")
for term in b["undominated_terms"]:
    print("    ", term)
print(f"  minimax at kappa = {b['kappa']}, giving T^({b['exponent']}) = T^(3/4 - {b['theta']})")
print(f"  lines meeting there: {', '.join(str(t) for t in b['binding_terms'])}")

print("\nConductor-dropping point t = t_f - t_g ~ T^nu")
low, high = theorem2_regime_formulas()
print(f"  low regime : kappa = {low['kappa']}, exponent = {low['exponent']}")
print(f"  high regime: kappa = {high['kappa']}, exponent = {high['exponent']}")
for nu in (Fraction(3, 4), Fraction(4, 5), Fraction(14, 17), Fraction(9, 10), Fraction(1)):
    r = theorem2_bound(nu)
    print(f"  nu = {str(nu):>5}: exponent {str(r['exponent']):>7} (convexity {r['convexity']}), "
          f"regime {r['regime']}, saving {r['theta']}")
c = crossover_nu()
print(f"  the two regimes meet at nu = {c['nu']} with exponent {c['value']}")
