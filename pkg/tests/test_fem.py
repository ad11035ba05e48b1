"""Meshing, P1 assembly against hand-computed element matrices, eigenvalue
accuracy against separation-of-variables and Bessel references, and the
corpus/extremal-family sweeps."""

import numpy as np
import pytest

from capfold.exceptions import InvalidSpecError, NeckTooNarrowError
from capfold.fem import (
    Mesh,
    assemble,
    build_mesh,
    mesh_from_text,
    mesh_to_text,
    neumann_eigs,
    parse_domain_spec,
    two_disk_area,
    verify_corpus,
)
from capfold.measures import ConformalDomain
from capfold.specfun import mu1_disk, planar_bound

PI2 = np.pi**2


# ----------------------------------------------------------------- meshes

def test_rectangle_mesh_exact_area():
    mesh = build_mesh({"kind": "rectangle", "a": 1.0, "b": 1.0}, 0.05)
    assert mesh.area == pytest.approx(1.0, abs=1e-14)
    assert np.all(mesh.areas > 0)


def test_disk_mesh_area():
    mesh = build_mesh({"kind": "disk", "radius": 1.0}, 0.02)
    assert mesh.area == pytest.approx(np.pi, rel=1e-3)


def test_mesh_is_edge_connected_and_boundary_consistent():
    mesh = build_mesh({"kind": "disk"}, 0.1)
    # every boundary edge belongs to exactly one triangle by construction;
    # interior edges to exactly two
    edges = {}
    for tri in mesh.triangles:
        for i, j in ((0, 1), (1, 2), (2, 0)):
            key = (min(tri[i], tri[j]), max(tri[i], tri[j]))
            edges[key] = edges.get(key, 0) + 1
    counts = np.array(list(edges.values()))
    assert set(np.unique(counts)) <= {1, 2}
    assert (counts == 1).sum() == len(mesh.boundary_edges)
    # connectivity via union-find over shared edges
    parent = list(range(len(mesh.vertices)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for tri in mesh.triangles:
        for i, j in ((0, 1), (1, 2)):
            ra, rb = find(tri[i]), find(tri[j])
            if ra != rb:
                parent[ra] = rb
    roots = {find(v) for tri in mesh.triangles for v in tri}
    assert len(roots) == 1


def test_no_duplicate_vertices():
    mesh = build_mesh({"kind": "disk"}, 0.05)
    rounded = np.round(mesh.vertices, 12)
    unique = np.unique(rounded, axis=0)
    assert len(unique) == len(mesh.vertices)


def test_two_disk_area_formula():
    # against numerically integrated indicator on a fine grid
    eps, length = 0.3, 0.2
    exact = two_disk_area(eps, length)
    from capfold.fem import _two_disk_signed

    n = 1600
    xs = np.linspace(-2.4, 2.4, n)
    ys = np.linspace(-1.2, 1.2, n)
    xg, yg = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([xg.ravel(), yg.ravel()], axis=1)
    inside = _two_disk_signed(eps, length, pts) > 0
    cell = (xs[1] - xs[0]) * (ys[1] - ys[0])
    mc = inside.sum() * cell
    assert exact == pytest.approx(mc, rel=2e-3)


def test_two_disk_mesh_area():
    mesh = build_mesh({"kind": "two_disks_neck", "eps": 0.1, "neck_length": 0.2}, 0.01)
    assert mesh.area == pytest.approx(two_disk_area(0.1, 0.2), rel=1e-3)


def test_neck_too_narrow_guard():
    with pytest.raises(NeckTooNarrowError):
        build_mesh({"kind": "two_disks_neck", "eps": 0.05, "neck_length": 0.2}, 0.02)


def test_invalid_spec():
    with pytest.raises(InvalidSpecError):
        build_mesh({"kind": "pentagon"}, 0.1)
    with pytest.raises(InvalidSpecError):
        build_mesh({"no": "kind"}, 0.1)


def test_conformal_mesh_area(bent_domain):
    mesh = build_mesh(bent_domain, 0.02)
    assert mesh.area == pytest.approx(bent_domain.area, rel=1e-3)


def test_mesh_text_roundtrip():
    mesh = build_mesh({"kind": "rectangle", "a": 1, "b": 2}, 0.25)
    back = mesh_from_text(mesh_to_text(mesh))
    assert np.array_equal(back.triangles, mesh.triangles)
    assert np.allclose(back.vertices, mesh.vertices)
    assert np.array_equal(back.boundary_edges, mesh.boundary_edges)


def test_parse_domain_spec():
    assert parse_domain_spec("disk")["kind"] == "disk"
    assert parse_domain_spec("square")["a"] == 1.0
    spec = parse_domain_spec("rectangle:2x1")
    assert spec["a"] == 2.0 and spec["b"] == 1.0
    spec = parse_domain_spec("two_disks:0.1,0.2")
    assert spec["eps"] == 0.1
    with pytest.raises(InvalidSpecError):
        parse_domain_spec("heptagon")


# --------------------------------------------------------------- assembly

def test_reference_triangle_element_matrices():
    # unit right triangle: hand-computed P1 stiffness and consistent mass
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tris = np.array([[0, 1, 2]])
    mesh = Mesh(verts, tris, np.array([[0, 1], [1, 2], [2, 0]]))
    stiffness, mass = assemble(mesh)
    k_ref = 0.5 * np.array([[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    m_ref = (0.5 / 12.0) * np.array(
        [[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]
    )
    assert np.allclose(stiffness.toarray(), k_ref, atol=1e-14)
    assert np.allclose(mass.toarray(), m_ref, atol=1e-15)


def test_degenerate_triangle_rejected():
    from capfold.exceptions import DegenerateTriangleError

    verts = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    mesh = Mesh(verts, np.array([[0, 1, 2]]), np.zeros((0, 2), dtype=np.int64))
    with pytest.raises(DegenerateTriangleError):
        assemble(mesh)


def test_stiffness_kernel_and_mass_partition():
    mesh = build_mesh({"kind": "disk"}, 0.05)
    stiffness, mass = assemble(mesh)
    ones = np.ones(stiffness.shape[0])
    assert np.max(np.abs(stiffness @ ones)) < 1e-12
    assert float(ones @ (mass @ ones)) == pytest.approx(mesh.area, abs=1e-12)


# ------------------------------------------------------------ eigenvalues

def test_disk_eigenvalues():
    mesh = build_mesh({"kind": "disk"}, 0.02)
    res = neumann_eigs(mesh, k=3, h=0.02)
    assert res.mu(0) < 1e-8 * res.mu(1)
    assert res.mu(1) == pytest.approx(mu1_disk(), rel=0.01)
    # double eigenvalue on the disk
    assert res.mu(2) == pytest.approx(res.mu(1), rel=1e-3)
    assert np.all(np.diff(res.eigenvalues) > -1e-10)
    assert np.all(res.residuals < 1e-9)


def test_square_eigenvalues():
    mesh = build_mesh({"kind": "rectangle", "a": 1, "b": 1}, 0.02)
    res = neumann_eigs(mesh, k=3, h=0.02)
    assert res.mu(1) == pytest.approx(PI2, rel=0.01)
    assert res.mu(2) == pytest.approx(PI2, rel=0.01)


def test_rectangle_products():
    mesh = build_mesh({"kind": "rectangle", "a": 2, "b": 1}, 0.02)
    res = neumann_eigs(mesh, k=2, h=0.02)
    assert res.mu(2) * res.area == pytest.approx(2 * PI2, rel=0.02)
    assert res.mu(2) * res.area < planar_bound()


def test_disk_convergence_order():
    errs = []
    for h in (0.08, 0.04):
        mesh = build_mesh({"kind": "disk"}, h)
        res = neumann_eigs(mesh, k=2, h=h)
        errs.append(abs(res.mu(1) - mu1_disk()))
    assert errs[0] / errs[1] >= 3.0  # O(h^2) up to constant slack


def test_scale_invariance():
    base = build_mesh({"kind": "rectangle", "a": 1, "b": 1}, 0.05)
    scaled = Mesh(2.5 * base.vertices, base.triangles, base.boundary_edges)
    res1 = neumann_eigs(base, k=2)
    res2 = neumann_eigs(scaled, k=2)
    for i in (1, 2):
        assert res2.mu(i) == pytest.approx(res1.mu(i) / 2.5**2, rel=1e-9)
    assert res2.mu(1) * res2.area == pytest.approx(
        res1.mu(1) * res1.area, rel=1e-9
    )


@pytest.mark.slow
def test_corpus_sweep():
    specs = [
        {"kind": "rectangle", "a": 1.0, "b": 1.0, "name": "square"},
        {"kind": "rectangle", "a": 2.0, "b": 1.0, "name": "rect2x1"},
        {"kind": "disk", "radius": 1.0, "name": "disk"},
        {"kind": "conformal", "coeffs": [[1, 0], [0.3, 0]], "name": "bent"},
        {"kind": "conformal", "coeffs": [[1, 0], [0.2, 0], [0.05, 0]], "name": "wavy"},
    ]
    report = verify_corpus(specs, h=0.03)
    assert not report["failures"]
    assert report["all_ok"]
    szego = report["bounds"]["szego"]
    for row in report["rows"]:
        assert row["mu1_area"] <= szego * 1.02


@pytest.mark.slow
def test_two_disk_family_monotone():
    products = []
    for eps in (0.4, 0.2, 0.1):
        h = min(0.02, eps / 4.2)
        mesh = build_mesh(
            {"kind": "two_disks_neck", "eps": eps, "neck_length": 0.2}, h
        )
        res = neumann_eigs(mesh, k=2, h=h)
        products.append(res.mu(2) * res.area)
    assert products[0] < products[1] < products[2] < planar_bound()
