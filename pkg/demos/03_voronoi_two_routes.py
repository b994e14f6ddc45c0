"""Voronoi summation for a Maass form, checked on a real eigenform.

The left side is a short twisted sum of Hecke eigenvalues.  The right side is
a dual sum against integral transforms of the weight.  Those transforms are
computed two ways (Bessel kernels, Mellin-Barnes contour) and compared.
"""

import numpy as np

from rankin_delta.hecke import load_form
from rankin_delta.voronoi import VoronoiInstance, verify_voronoi, voronoi_g_transform
from rankin_delta.weights import bump

form = load_form()
w = bump(30.0, 60.0, power=4)
print(f"form: {form.name}, spectral parameter {form.spectral_R:.10f}")

inst = VoronoiInstance(form, 1, 2, w)
rep = verify_voronoi(inst)
print(f"a/q = 1/2: lhs {rep.details['lhs']:.10f}")
print(f"           rhs {rep.details['rhs']:.10f}  (relative residual {rep.residuals['relative_residual']:.1e})")

for y in np.geomspace(0.1, 10, 3):
    b = voronoi_g_transform(inst, y, "plus", "bessel")
    m = voronoi_g_transform(inst, y, "plus", "mellin")
    print(f"  G+({y:6.3f}): Bessel {b.real:+.10e}, Mellin {m.real:+.10e}")
