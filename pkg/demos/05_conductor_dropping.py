"""The analytic conductor drops when t sits near t_f - t_g.

Fit log C against log T along three families of parameters.
"""

from rankin_delta.lfunction import analytic_conductor, conductor_slope

for T in (1e2, 1e3, 1e4):
    print(f"T = {T:7.0f}: generic C = {analytic_conductor(T, T, T).conductor:.3e}, "
          f"sum point C = {analytic_conductor(T, T, 2 * T).conductor:.3e}")
print("slopes of log C vs log T:")
print(f"  generic           {conductor_slope('generic'):.3f}")
print(f"  t = t_f + t_g     {conductor_slope('sum'):.3f}")
for nu in (0.5, 0.75, 1.0):
    print(f"  t = t_f - t_g = T^{nu}: {conductor_slope('difference', nu=nu):.3f}")
