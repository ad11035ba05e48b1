"""The odd-dimensional sphere bound through the modified Rayleigh quotient.

On the 3-sphere the conformally invariant quotient of a lifted coordinate
stays below (n+1)(2 K_n)^(2/n).  The degree diagnostics explain why odd
dimensions are special: the antipodal-reflection direction map has degree 2
(so its projective version has degree 4), which is what obstructs an
everywhere-simple direction field.
"""

import numpy as np

from capfold import (
    Cap,
    bound_constants,
    rearrange,
    sphere_degree_check,
    sphere_modified_quotient,
    sphere_quadrature,
)
from capfold.exceptions import EvenDimensionError
from capfold.measures import DiscreteMeasure, direction_form

n = 3
bc = bound_constants(n)
print(f"n = {n}: theorem constant = {bc.theorem_constant:.4f}, "
      f"conjectured = {bc.conjecture_constant:.4f}, ratio = {bc.ratio:.4f}")

g0 = sphere_quadrature(n, resolution=14)
uniform = g0.scaled(1.0 / g0.total_mass)
bumped = DiscreteMeasure("sphere", g0.points, g0.weights * (1 + 0.3 * g0.points[:, 1]))
bumped = bumped.scaled(1.0 / bumped.total_mass)

print("\nmodified Rayleigh quotients (unit-mass measures):")
for name, g in (("uniform", uniform), ("perturbed", bumped)):
    for cap in (Cap(0.3, np.eye(4)[0], "sphere"), Cap(-0.4, np.eye(4)[1], "sphere")):
        nu, trace = rearrange(g, cap)
        s = direction_form(nu).max_direction
        out = sphere_modified_quotient(g, cap, s, trace=trace)
        print(
            f"  {name}, cap r = {cap.r:+.1f}: quotient = {out['quotient']:.4f}"
            f" < {out['constant']:.4f}  (denominator {out['denominator']:.4f})"
        )

print("\ndegree diagnostics:")
print(f"  n = 3: {sphere_degree_check(3)}")
try:
    sphere_degree_check(2)
except EvenDimensionError as exc:
    print(f"  n = 2 rejected: {exc}")
