"""Closed-form constants behind the eigenvalue bounds.

The planar story is driven by the first positive zero of J1': its square is
the first positive Neumann eigenvalue of the unit disk, and the two-disk
bound for the second eigenvalue is twice that times pi.  The sphere story
compares the proved constant against the conjectured sharp one.
"""

import numpy as np

from capfold import bound_constants, find_zeta, k_n, mu1_disk, omega_n, planar_bound

zeta = find_zeta()
print(f"zeta (first positive zero of J1')  = {zeta:.12f}")
print(f"mu_1 of the unit disk = zeta^2      = {mu1_disk():.10f}")
print(f"second-eigenvalue bound 2 zeta^2 pi = {planar_bound():.6f}")
print(f"  compare: first-eigenvalue (szego) bound = {mu1_disk() * np.pi:.6f}")
print(f"  compare: k=2 tiling (polya) bound       = {8 * np.pi:.6f}")
print()

print("sphere volumes and gradient-power constants:")
for n in (1, 2, 3, 4, 5):
    print(f"  n={n}:  omega_n = {omega_n(n):10.6f}   K_n = {k_n(n):10.6f}")
print()

print("proved vs conjectured second-eigenvalue constants (odd dimensions):")
print("   n   theorem      conjectured  ratio")
for n in (3, 5, 7, 9, 21, 51, 99):
    bc = bound_constants(n)
    print(
        f"  {n:3d}  {bc.theorem_constant:10.4f}  {bc.conjecture_constant:10.4f}"
        f"  {bc.ratio:.6f}"
    )
print()
print("the ratio peaks at n = 5 and then decreases toward 1; every odd")
print("dimension n >= 3 stays inside the window (1, 1.04)")
