"""Certificates for the planar second-eigenvalue bound.

An isotropic (multiple) measure is certified directly with the disk
eigenfunction coordinates against mu_1; an anisotropic one goes through the
multiple-cap scan and the lifted test functions against 2 mu_1.  In both
cases the reported quotient stays below the branch bound, which after
unit-area normalization is exactly the mu_2 * Area statement.
"""

from capfold import ConformalDomain, mu1_disk, planar_bound, planar_bound_certificate

corpus = {
    "disk (identity map)": ConformalDomain([1.0]),
    "z + 0.3 z^2": ConformalDomain([1.0, 0.3]),
    "z + 0.2 z^2 + 0.05 z^3": ConformalDomain([1.0, 0.2, 0.05]),
    "z + 0.05 z^5 (4-fold symmetric)": ConformalDomain([1.0, 0, 0, 0, 0.05]),
}

print(f"branch bounds: mu_1 = {mu1_disk():.5f}, 2 mu_1 = {2 * mu1_disk():.5f}")
print(f"(equivalently mu_2 * Area <= {planar_bound():.4f})\n")
for name, domain in corpus.items():
    report = planar_bound_certificate(domain, name)
    print(f"{name}:")
    print(f"  area = {report.area:.6f}, branch = {report.branch}")
    print(
        f"  quotient_sup = {report.quotient_sup:.6f} <= bound = {report.bound:.6f}"
        f"  (margin {report.margin:+.2e}, holds: {report.holds})"
    )
    if report.cap is not None:
        print(f"  multiple cap at r = {report.cap.r:.4f}, gap = {report.gap:.1e}")
    print()
