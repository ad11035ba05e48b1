"""Independent finite-element ground truth.

A P1 Neumann eigensolver checks the analytic constants (disk, square) and
sweeps a corpus of domains against the eigenvalue bounds.  The two-disk
family with a narrowing passage approaches the two-disk bound from below,
realizing the extremal configuration.
"""

import numpy as np

from capfold import build_mesh, mu1_disk, neumann_eigs, planar_bound, two_disk_area

print("reference eigenvalues:")
for name, spec, exact in (
    ("unit disk", {"kind": "disk"}, mu1_disk()),
    ("unit square", {"kind": "rectangle", "a": 1, "b": 1}, np.pi**2),
):
    mesh = build_mesh(spec, 0.02)
    res = neumann_eigs(mesh, k=2, h=0.02)
    print(
        f"  {name}: mu_1 = {res.mu(1):.6f} (exact {exact:.6f}, "
        f"rel err {abs(res.mu(1) - exact) / exact:.1e}); "
        f"mu_2 = {res.mu(2):.6f}"
    )

print(f"\ntwo-disk family (passage width eps, bound {planar_bound():.4f}):")
for eps in (0.4, 0.2, 0.1, 0.05):
    h = min(0.02, eps / 4.2)
    mesh = build_mesh({"kind": "two_disks_neck", "eps": eps, "neck_length": 0.2}, h)
    res = neumann_eigs(mesh, k=2, h=h)
    exact_area = two_disk_area(eps, 0.2)
    print(
        f"  eps = {eps:4.2f}: area = {res.area:.5f} (exact {exact_area:.5f}), "
        f"mu_2 * Area = {res.mu(2) * res.area:.4f}"
    )
print("mu_2 * Area climbs toward the bound as the passage narrows")
