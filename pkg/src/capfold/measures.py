"""Discrete quadrature-atom measures on the closed unit disk and unit n-sphere.

A measure is a finite set of weighted atoms.  Disk atoms are stored as
complex numbers, sphere atoms as rows of an (N, n+1) array.  Weights are
never normalized implicitly: total mass is semantic (for a conformal
pullback it equals the image area).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    NegativeDensityError,
    SpaceMismatchError,
    UnivalenceError,
)
from .specfun import bessel_j1, find_zeta, j1_over_x

__all__ = [
    "DiscreteMeasure",
    "DirectionForm",
    "ConformalDomain",
    "disk_quadrature",
    "disk_grid",
    "sphere_quadrature",
    "pullback_measure",
    "coordinate_values",
    "moment_vector",
    "direction_form",
    "measure_distance",
    "measure_to_json",
    "measure_from_json",
]

_BOUNDARY_SLACK = 1e-9


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted atoms on the closed disk or the unit n-sphere.

    Parameters
    ----------
    space : str
        Either ``"disk"`` or ``"sphere"``.
    points : ndarray
        Complex array of shape (N,) for the disk; float array of shape
        (N, n+1) for the sphere.
    weights : ndarray
        Nonnegative weights, one per atom.
    """

    space: str
    points: np.ndarray
    weights: np.ndarray
    grid_shape: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.space not in ("disk", "sphere"):
            raise ValueError(f"unknown space {self.space!r}")
        if np.any(self.weights < 0):
            raise NegativeDensityError("atom weights must be nonnegative")
        if self.space == "disk":
            if np.any(np.abs(self.points) > 1.0 + _BOUNDARY_SLACK):
                raise ValueError("disk atoms must lie in the closed unit disk")
        else:
            norms = np.linalg.norm(self.points, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-9):
                raise ValueError("sphere atoms must lie on the unit sphere")

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def sphere_dim(self) -> int:
        """Dimension n of the sphere (points live in R^(n+1)); 1 for the disk."""
        if self.space == "disk":
            return 1
        return self.points.shape[1] - 1

    @property
    def ambient_dim(self) -> int:
        """Number of coordinate directions: 2 on the disk, n+1 on the sphere."""
        return 2 if self.space == "disk" else self.points.shape[1]

    def with_points(self, points) -> "DiscreteMeasure":
        """Same weights, new atom positions (e.g. after a pushforward).

        Transported atoms no longer sit on any quadrature grid, so the grid
        tag is dropped.
        """
        return DiscreteMeasure(self.space, points, self.weights)

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(
            self.space, self.points, self.weights * factor, self.grid_shape
        )

    def same_space(self, other: "DiscreteMeasure") -> bool:
        return (
            self.space == other.space and self.ambient_dim == other.ambient_dim
        )


def disk_grid(n_r: int = 96, n_theta: int = 192):
    """Standard polar grid: Gauss-Legendre radii x uniform angles.

    Returns (points, base_weights, radii, radial_weights) where base_weights
    already contain the r dr dtheta area element, so that a density-1 measure
    has total mass pi.
    """
    if n_r < 4 or n_theta < 4:
        raise ValueError("need n_r, n_theta >= 4")
    x, wx = np.polynomial.legendre.leggauss(n_r)
    radii = 0.5 * (x + 1.0)
    wr = 0.5 * wx
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    r_mat, th_mat = np.meshgrid(radii, theta, indexing="ij")
    points = (r_mat * np.exp(1j * th_mat)).ravel()
    base = np.outer(radii * wr, np.full(n_theta, 2.0 * np.pi / n_theta)).ravel()
    return points, base, radii, wr


def disk_quadrature(n_r: int, n_theta: int, density=None) -> DiscreteMeasure:
    """Tensor quadrature measure with the given density on the unit disk.

    ``density`` is a callable taking a complex array; ``None`` means the
    uniform density 1 (Lebesgue measure, mass pi).
    """
    points, base, _, _ = disk_grid(n_r, n_theta)
    if density is None:
        weights = base
    else:
        values = np.asarray(density(points), dtype=float)
        if np.any(values < 0):
            raise NegativeDensityError("density is negative on the grid")
        weights = base * values
    return DiscreteMeasure("disk", points, weights, grid_shape=(n_r, n_theta))


def sphere_quadrature(n: int, resolution: int = 24) -> "DiscreteMeasure":
    """Product-angle quadrature for the round measure on the unit n-sphere.

    Gauss-Legendre in the polar angles, uniform in the final azimuthal one.
    Total mass equals omega_n to quadrature accuracy (exactly, for the
    trigonometric-polynomial weights involved).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        m = 2 * resolution
        theta = 2.0 * np.pi * np.arange(m) / m
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        w = np.full(m, 2.0 * np.pi / m)
        return DiscreteMeasure("sphere", pts, w)

    grids = []
    for k in range(n - 1):
        x, w = np.polynomial.legendre.leggauss(resolution)
        grids.append((0.5 * np.pi * (x + 1.0), 0.5 * np.pi * w))
    m_az = 2 * resolution
    az = 2.0 * np.pi * np.arange(m_az) / m_az
    az_w = np.full(m_az, 2.0 * np.pi / m_az)

    angle_arrays = [g[0] for g in grids] + [az]
    weight_arrays = [g[1] for g in grids] + [az_w]
    mesh = np.meshgrid(*angle_arrays, indexing="ij")
    wmesh = np.meshgrid(*weight_arrays, indexing="ij")

    shape = mesh[0].shape
    coords = np.empty(shape + (n + 1,), dtype=float)
    sin_prod = np.ones(shape)
    for k in range(n):
        coords[..., k] = sin_prod * np.cos(mesh[k])
        sin_prod = sin_prod * np.sin(mesh[k])
    coords[..., n] = sin_prod

    weight = np.ones(shape)
    for k in range(n - 1):
        weight = weight * np.sin(mesh[k]) ** (n - 1 - k)
    for wm in wmesh:
        weight = weight * wm

    return DiscreteMeasure("sphere", coords.reshape(-1, n + 1), weight.ravel())


@dataclass(frozen=True)
class ConformalDomain:
    """Simply-connected planar domain given as a polynomial image of the disk.

    The map is z -> sum_k coeffs[k-1] z^k with coeffs[0] = c1 != 0.  The
    cheap univalence certificate sum_{k>=2} k |c_k| < |c_1| is tried first;
    otherwise a derivative grid check plus a boundary self-intersection test
    must pass.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", c)
        if len(c) == 0 or c[0] == 0:
            raise UnivalenceError("leading coefficient c1 must be nonzero")
        if not self._certificate() and not self._grid_check():
            raise UnivalenceError("could not certify univalence of the map")

    def _certificate(self) -> bool:
        c = self.coeffs
        tail = sum((k + 1) * abs(c[k]) for k in range(1, len(c)))
        return tail < abs(c[0])

    def _grid_check(self) -> bool:
        pts, _, _, _ = disk_grid(48, 96)
        if np.min(np.abs(self.derivative(pts))) <= 0.0:
            return False
        theta = 2.0 * np.pi * np.arange(720) / 720
        bnd = self.map(np.exp(1j * theta))
        return not _polyline_self_intersects(bnd)

    @property
    def area(self) -> float:
        """Area of the image domain: pi * sum k |c_k|^2."""
        c = self.coeffs
        return float(np.pi * sum((k + 1) * abs(c[k]) ** 2 for k in range(len(c))))

    def map(self, z):
        out = np.zeros_like(np.asarray(z, dtype=complex))
        for ck in self.coeffs[::-1]:
            out = (out + ck) * z
        return out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k in range(len(self.coeffs), 0, -1):
            out = out * z + k * self.coeffs[k - 1]
        return out

    def density(self, z):
        """Pullback area density |phi'(z)|^2."""
        return np.abs(self.derivative(z)) ** 2


def _polyline_self_intersects(pts: np.ndarray) -> bool:
    # O(m^2) segment test on a closed polyline; fine at the resolutions used
    p = np.stack([pts.real, pts.imag], axis=1)
    q = np.roll(p, -1, axis=0)
    m = len(p)
    d = q - p
    for i in range(m):
        js = np.arange(i + 2, m if i > 0 else m - 1)
        if len(js) == 0:
            continue
        r = p[js] - p[i]
        denom = d[i, 0] * d[js, 1] - d[i, 1] * d[js, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (r[:, 0] * d[js, 1] - r[:, 1] * d[js, 0]) / denom
            u = (r[:, 0] * d[i, 1] - r[:, 1] * d[i, 0]) / denom
        hit = (
            np.isfinite(t)
            & np.isfinite(u)
            & (t > 1e-12)
            & (t < 1 - 1e-12)
            & (u > 1e-12)
            & (u < 1 - 1e-12)
        )
        if np.any(hit):
            return True
    return False


def pullback_measure(
    domain: ConformalDomain, n_r: int = 96, n_theta: int = 192
) -> DiscreteMeasure:
    """Disk measure with density |phi'|^2; total mass equals the domain area."""
    return disk_quadrature(n_r, n_theta, domain.density)


def disk_coordinate_values(z, s) -> np.ndarray:
    """Disk eigenfunction coordinate X_s(z) = J1(zeta |z|) (z . s)/|z|.

    ``s`` is a complex unit; the J1(x)/x form keeps the origin stable.
    """
    s = complex(s)
    z = np.asarray(z, dtype=complex)
    amp = find_zeta() * j1_over_x(find_zeta() * np.abs(z))
    return amp * (z.real * s.real + z.imag * s.imag)


def coordinate_values(m: DiscreteMeasure, s) -> np.ndarray:
    """Eigenfunction coordinate X_s sampled at the atoms of ``m``.

    Disk: see ``disk_coordinate_values``.  Sphere: X_s(x) = (x, s).
    """
    if m.space == "disk":
        return disk_coordinate_values(m.points, s)
    s = np.asarray(s, dtype=float)
    return m.points @ s


def _disk_xy_factors(points: np.ndarray):
    amp = find_zeta() * j1_over_x(find_zeta() * np.abs(points))
    return amp * points.real, amp * points.imag


def moment_vector_raw(space: str, points, weights) -> np.ndarray:
    """Moment vector on raw arrays (no measure validation); solver internals."""
    if space == "disk":
        x1, x2 = _disk_xy_factors(np.asarray(points, dtype=complex))
        weights = np.asarray(weights, dtype=float)
        return np.array([np.sum(weights * x1), np.sum(weights * x2)])
    return np.asarray(points, dtype=float).T @ np.asarray(weights, dtype=float)


def moment_vector(m: DiscreteMeasure) -> np.ndarray:
    """First-order moments (integral of X_{e_i}) for each coordinate direction."""
    return moment_vector_raw(m.space, m.points, m.weights)


def moment_scale(m: DiscreteMeasure) -> float:
    """Natural scale of first moments, used to normalize solver residuals."""
    if m.space == "disk":
        return m.total_mass * bessel_j1(find_zeta())
    return m.total_mass


def is_renormalized(m: DiscreteMeasure, tol: float = 1e-8) -> bool:
    return bool(np.max(np.abs(moment_vector(m))) < tol * moment_scale(m))


@dataclass(frozen=True)
class DirectionForm:
    """Quadratic form V(s) = integral of X_s^2, with its eigen-structure.

    ``matrix`` is the symmetric moment matrix; ``eig_max`` the top eigenvalue
    M; ``eig_second`` the runner-up m (on the disk simply the other one);
    ``max_direction`` a top unit eigenvector.
    """

    matrix: np.ndarray
    eig_max: float
    eig_second: float
    max_direction: np.ndarray

    @property
    def gap(self) -> float:
        """Relative eigenvalue gap (M - m)/(M + m); zero means multiple."""
        tot = self.eig_max + self.eig_second
        if tot <= 0:
            return 0.0
        return (self.eig_max - self.eig_second) / tot

    def value(self, s) -> float:
        s = np.asarray(s, dtype=float)
        return float(s @ self.matrix @ s)


def direction_form(m: DiscreteMeasure) -> DirectionForm:
    """Assemble and diagonalize the matrix of second moments of X."""
    if m.space == "disk":
        x1, x2 = _disk_xy_factors(m.points)
        cols = np.stack([x1, x2], axis=1)
    else:
        cols = m.points
    mat = cols.T @ (cols * m.weights[:, None])
    mat = 0.5 * (mat + mat.T)
    evals, evecs = np.linalg.eigh(mat)
    return DirectionForm(
        matrix=mat,
        eig_max=float(evals[-1]),
        eig_second=float(evals[-2]),
        max_direction=evecs[:, -1].copy(),
    )


def _dictionary(m: DiscreteMeasure):
    mass = m.total_mass
    vec = moment_vector(m)
    mat = direction_form(m).matrix
    if m.space == "disk":
        radii = np.abs(m.points)
        rad = np.array([np.sum(m.weights * radii**k) for k in (1, 2, 3, 4)])
    else:
        rad = np.zeros(0)
    return mass, vec, mat, rad


def measure_distance(m1: DiscreteMeasure, m2: DiscreteMeasure) -> float:
    """Moment metric between two measures on the same space.

    The dictionary consists of the coordinate functions X_{e_i}, their
    pairwise products, and low-order radial moments; vector and matrix blocks
    enter through rotation-invariant norms, so the metric commutes exactly
    with isometries of the space.
    """
    if not m1.same_space(m2):
        raise SpaceMismatchError("measures live on different spaces")
    mass1, v1, b1, r1 = _dictionary(m1)
    mass2, v2, b2, r2 = _dictionary(m2)
    parts = [
        abs(mass1 - mass2),
        float(np.linalg.norm(v1 - v2)),
        float(np.linalg.norm(b1 - b2, ord="fro")),
    ]
    if len(r1):
        parts.append(float(np.max(np.abs(r1 - r2))))
    return max(parts)


def measure_to_json(m: DiscreteMeasure) -> str:
    """Versioned JSON document {schema, space, n, atoms: [[x..., w], ...]}."""
    if m.space == "disk":
        atoms = [
            [float(z.real), float(z.imag), float(w)]
            for z, w in zip(m.points, m.weights)
        ]
    else:
        atoms = [
            [*map(float, x), float(w)] for x, w in zip(m.points, m.weights)
        ]
    doc = {
        "schema": 1,
        "space": m.space,
        "n": int(m.sphere_dim),
        "atoms": atoms,
    }
    return json.dumps(doc)


def measure_from_json(text: str) -> DiscreteMeasure:
    doc = json.loads(text)
    if doc.get("schema") != 1:
        raise ValueError("unsupported measure schema")
    atoms = np.asarray(doc["atoms"], dtype=float)
    if doc["space"] == "disk":
        return DiscreteMeasure(
            "disk", atoms[:, 0] + 1j * atoms[:, 1], atoms[:, 2]
        )
    return DiscreteMeasure("sphere", atoms[:, :-1], atoms[:, -1])
