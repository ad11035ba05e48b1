"""Maximizing-direction analysis: simple/multiple classification, canonical
normalization of a measure, the cap scan locating a multiple cap for simple
measures, and the winding / degree diagnostics that stand in for the
topological existence arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .caps import Cap, rearrange
from .exceptions import (
    CapScanError,
    DegenerateFieldError,
    DimensionUnsupportedError,
    EvenDimensionError,
    ZeroMassError,
)
from .measures import DiscreteMeasure, direction_form
from .moebius import pushforward, renormalize

__all__ = [
    "Classification",
    "classify",
    "CanonicalMap",
    "canonicalize",
    "CapScanResult",
    "scan_caps",
    "winding_diagnostic",
    "sphere_degree_check",
    "sphere_cap_search",
]

SCAN_GAP_TOL = 1e-3
REFINED_GAP_TOL = 1e-6


@dataclass(frozen=True)
class Classification:
    multiple: bool
    direction: np.ndarray | None
    gap: float


def classify(m: DiscreteMeasure, eps: float = SCAN_GAP_TOL) -> Classification:
    """Simple vs multiple by the relative gap of the top two eigenvalues."""
    if m.total_mass <= 0:
        raise ZeroMassError("cannot classify a zero measure")
    form = direction_form(m)
    if form.gap < eps:
        return Classification(multiple=True, direction=None, gap=form.gap)
    return Classification(multiple=False, direction=form.max_direction, gap=form.gap)


@dataclass(frozen=True)
class CanonicalMap:
    """Balancing point and rotation bringing a measure to canonical position.

    Disk: atoms move by the Moebius map at ``xi`` followed by multiplication
    with ``rotation`` (a unit complex number).  Sphere: the Moebius stage is
    followed by the orthogonal matrix ``rotation``.
    """

    space: str
    xi: object
    rotation: object

    def apply_points(self, pts):
        from .moebius import ball_moebius, disk_moebius

        if self.space == "disk":
            return self.rotation * disk_moebius(complex(self.xi), pts)
        return ball_moebius(self.xi, pts) @ np.asarray(self.rotation).T

    def density(self, base_density):
        """Density of the canonicalized pushforward, for a disk base density."""
        if self.space != "disk":
            raise DimensionUnsupportedError("density transport is a disk feature")
        from .moebius import disk_moebius, disk_moebius_derivative

        rot = complex(self.rotation)
        xi = complex(self.xi)

        def dens(z):
            z = np.asarray(z, dtype=complex)
            w = disk_moebius(-xi, np.conj(rot) * z)
            jac = np.abs(disk_moebius_derivative(-xi, np.conj(rot) * z)) ** 2
            return base_density(w) * jac

        return dens


def _rotation_to_e1(direction: np.ndarray) -> np.ndarray:
    """Orthogonal matrix sending ``direction`` to the first basis vector."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    n = len(d)
    e1 = np.zeros(n)
    e1[0] = 1.0
    v = d - e1
    nv = np.linalg.norm(v)
    if nv < 1e-14:
        return np.eye(n)
    v = v / nv
    return np.eye(n) - 2.0 * np.outer(v, v)  # Householder swaps d and e1


def canonicalize(
    m: DiscreteMeasure, tol: float = 1e-10
) -> tuple[DiscreteMeasure, CanonicalMap]:
    """Balance the measure, then rotate its maximizing direction onto e1.

    After this both normalization conventions hold: all first moments vanish
    and the first coordinate direction maximizes the quadratic form.
    """
    result = renormalize(m, tol=tol)
    balanced = pushforward(m, result.xi)
    form = direction_form(balanced)
    if m.space == "disk":
        s = form.max_direction
        angle = np.arctan2(s[1], s[0])
        rot = np.exp(-1j * angle)
        canon = balanced.with_points(rot * balanced.points)
        cmap = CanonicalMap("disk", complex(result.xi), complex(rot))
    else:
        rmat = _rotation_to_e1(form.max_direction)
        canon = balanced.with_points(balanced.points @ rmat.T)
        cmap = CanonicalMap("sphere", result.xi, rmat)
    return canon, cmap


# ---------------------------------------------------------------------------
# direction field over caps, winding, and the multiple-cap scan
# ---------------------------------------------------------------------------

def _field_entry(m: DiscreteMeasure, cap: Cap, tol: float = 1e-9):
    nu, _ = rearrange(m, cap, tol=tol)
    form = direction_form(nu)
    return form.gap, form.max_direction, form


def _projective_delta(prev_angle: float, raw_angle: float) -> float:
    return (raw_angle - prev_angle + np.pi / 2.0) % np.pi - np.pi / 2.0


@dataclass
class CapScanResult:
    """Outcome of a multiple-cap search.

    ``cap``/``gap``: the best cap found and its relative eigen-gap;
    ``direction_field``: list of (r, theta, s_x, s_y, gap) grid rows;
    ``winding_numbers``: half-turn counts of the direction field along each
    scanned r-level loop.
    """

    cap: Cap
    gap: float
    direction_field: list = field(default_factory=list)
    winding_numbers: dict = field(default_factory=dict)


def _traceless(m: DiscreteMeasure, cap: Cap) -> np.ndarray:
    nu, _ = rearrange(m, cap, tol=1e-9)
    mat = direction_form(nu).matrix
    return np.array([mat[0, 0] - mat[1, 1], 2.0 * mat[0, 1]])


def scan_caps(
    m: DiscreteMeasure,
    r_grid=None,
    theta_grid=None,
    eps: float = SCAN_GAP_TOL,
    max_depth: int = 12,
) -> CapScanResult:
    """Locate a cap whose rearranged measure is multiple.

    Strategy: evaluate the direction field over the (r, theta) grid; find the
    cell around which the field makes a half turn (such a cell must contain a
    degeneracy); subdivide that cell recursively, then polish with Newton on
    the traceless part of the direction form.  Raises ``CapScanError`` with
    the minimal-gap cap when the budget is exhausted.
    """
    if m.space != "disk":
        raise DimensionUnsupportedError("scan_caps operates on disk measures")
    if r_grid is None:
        r_grid = np.linspace(-0.8, 0.8, 9)
    if theta_grid is None:
        theta_grid = np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False)
    r_grid = np.asarray(r_grid, dtype=float)
    theta_grid = np.asarray(theta_grid, dtype=float)

    rows = []
    table = {}
    best_gap, best_cap = np.inf, None
    for r in r_grid:
        for th in theta_grid:
            cap = Cap(float(r), np.exp(1j * th), "disk")
            gap, s, _ = _field_entry(m, cap)
            table[(float(r), float(th))] = (gap, s)
            rows.append((float(r), float(th), float(s[0]), float(s[1]), float(gap)))
            if gap < best_gap:
                best_gap, best_cap = gap, cap

    windings = {
        float(r): _winding_from_field(
            [table[(float(r), float(th))] for th in theta_grid]
        )
        for r in r_grid
    }

    result = CapScanResult(
        cap=best_cap, gap=float(best_gap),
        direction_field=rows, winding_numbers=windings,
    )

    # pick the cell with a rotating direction field, preferring small gaps
    cell = _find_singular_cell(table, r_grid, theta_grid)
    if cell is None:
        rb, tb = float(best_cap.r), float(np.angle(best_cap.p)) % (2 * np.pi)
        dr = (r_grid[1] - r_grid[0]) if len(r_grid) > 1 else 0.2
        dt = (theta_grid[1] - theta_grid[0]) if len(theta_grid) > 1 else 0.4
        cell = (rb - dr / 2, rb + dr / 2, tb - dt / 2, tb + dt / 2)

    cap, gap = _refine_cell(m, cell, max_depth)
    if gap < result.gap:
        result.cap, result.gap = cap, float(gap)

    # Newton polish on the traceless components
    cap, gap = _newton_polish(m, result.cap, result.gap)
    if gap < result.gap:
        result.cap, result.gap = cap, float(gap)

    if result.gap >= eps:
        raise CapScanError(
            f"no multiple cap below gap {eps}",
            best_cap=result.cap, best_gap=result.gap,
        )
    return result


def _winding_from_field(entries) -> int:
    lift = None
    first = None
    for gap, s in entries:
        a = float(np.arctan2(s[1], s[0]))
        if lift is None:
            lift = a
            first = a
        else:
            lift += _projective_delta(lift, a)
    lift += _projective_delta(lift, first)
    return int(round((lift - first) / np.pi))


def _find_singular_cell(table, r_grid, theta_grid):
    nr, nt = len(r_grid), len(theta_grid)
    best = None
    for i in range(nr - 1):
        for j in range(nt):
            j2 = (j + 1) % nt
            quad = [
                table[(float(r_grid[i]), float(theta_grid[j]))],
                table[(float(r_grid[i]), float(theta_grid[j2]))],
                table[(float(r_grid[i + 1]), float(theta_grid[j2]))],
                table[(float(r_grid[i + 1]), float(theta_grid[j]))],
            ]
            rot = _loop_rotation([s for _, s in quad])
            if abs(rot) > np.pi / 2:
                score = min(g for g, _ in quad)
                if best is None or score < best[0]:
                    th_hi = theta_grid[j2] if j2 != 0 else theta_grid[j] + (
                        theta_grid[1] - theta_grid[0]
                    )
                    best = (
                        score,
                        (r_grid[i], r_grid[i + 1], theta_grid[j], th_hi),
                    )
    return best[1] if best else None


def _loop_rotation(directions) -> float:
    lift = None
    first = None
    for s in directions:
        a = float(np.arctan2(s[1], s[0]))
        if lift is None:
            lift = first = a
        else:
            lift += _projective_delta(lift, a)
    lift += _projective_delta(lift, first)
    return lift - first


def _refine_cell(m, cell, max_depth):
    r_lo, r_hi, t_lo, t_hi = cell
    best_gap, best_cap = np.inf, None
    for _ in range(max_depth):
        rs = np.linspace(r_lo, r_hi, 3)
        ts = np.linspace(t_lo, t_hi, 3)
        quads = {}
        for r in rs:
            for th in ts:
                cap = Cap(float(np.clip(r, -0.99, 0.99)), np.exp(1j * th), "disk")
                gap, s, _ = _field_entry(m, cap)
                quads[(r, th)] = (gap, s)
                if gap < best_gap:
                    best_gap, best_cap = gap, cap
        # descend into the subcell whose boundary field still rotates
        found = None
        for i in range(2):
            for j in range(2):
                loop = [
                    quads[(rs[i], ts[j])],
                    quads[(rs[i], ts[j + 1])],
                    quads[(rs[i + 1], ts[j + 1])],
                    quads[(rs[i + 1], ts[j])],
                ]
                if abs(_loop_rotation([s for _, s in loop])) > np.pi / 2:
                    found = (rs[i], rs[i + 1], ts[j], ts[j + 1])
                    break
            if found:
                break
        if found is None:
            break
        r_lo, r_hi, t_lo, t_hi = found
    return best_cap, best_gap


def _newton_polish(m, cap: Cap, gap: float, steps: int = 12):
    x = np.array([cap.r, float(np.angle(cap.p))])
    best = (gap, cap)
    for _ in range(steps):
        f = _traceless(m, Cap(float(x[0]), np.exp(1j * x[1]), "disk"))
        if np.linalg.norm(f) < 1e-14:
            break
        h = 1e-5
        jac = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            fp = _traceless(m, Cap(float(np.clip(x[0] + e[0], -0.995, 0.995)),
                                   np.exp(1j * (x[1] + e[1])), "disk"))
            fm = _traceless(m, Cap(float(np.clip(x[0] - e[0], -0.995, 0.995)),
                                   np.exp(1j * (x[1] - e[1])), "disk"))
            jac[:, k] = (fp - fm) / (2 * h)
        try:
            dx = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        norm = np.linalg.norm(dx)
        if norm > 0.25:
            dx *= 0.25 / norm
        x = x + dx
        x[0] = float(np.clip(x[0], -0.99, 0.99))
        cand = Cap(float(x[0]), np.exp(1j * x[1]), "disk")
        g, _, _ = _field_entry(m, cand)
        if g < best[0]:
            best = (g, cand)
    return best[1], best[0]


def winding_diagnostic(
    m: DiscreteMeasure, r: float, n_theta: int = 24
) -> int:
    """Half-turn count of the maximizing direction along the loop of caps
    a_{r, e^{i theta}}.

    A change of winding between two r-levels brackets a multiple cap.  Raises
    ``DegenerateFieldError`` if the eigen-gap vanishes on the loop, where the
    direction (and the count) is meaningless.
    """
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    entries = []
    for th in thetas:
        gap, s, _ = _field_entry(m, Cap(float(r), np.exp(1j * th), "disk"))
        if gap < 1e-9:
            raise DegenerateFieldError(f"gap {gap:.2e} on the loop at theta={th}")
        entries.append((gap, s))
    return _winding_from_field(entries)


# ---------------------------------------------------------------------------
# sphere-side diagnostics
# ---------------------------------------------------------------------------

def sphere_cap_search(
    m: DiscreteMeasure,
    eps: float = SCAN_GAP_TOL,
    r_grid=None,
    resolution: int = 8,
    refine_steps: int = 60,
    seed: int = 0,
) -> tuple[Cap, float]:
    """Coarse grid plus local descent for a small-gap spherical cap.

    The multiple caps form positive-codimension sets; for the mildly
    perturbed test measures a Nelder-Mead style descent on the gap reaches
    the scan tolerance quickly.
    """
    if m.space != "sphere":
        raise DimensionUnsupportedError("sphere_cap_search needs a sphere measure")
    dim = m.ambient_dim
    if r_grid is None:
        r_grid = np.linspace(-0.6, 0.6, 5)
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(resolution, dim))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]

    def gap_of(vec):
        r = float(np.tanh(vec[0]))
        p = vec[1:]
        n = np.linalg.norm(p)
        if n < 1e-12:
            return 1.0, None
        cap = Cap(float(np.clip(r, -0.95, 0.95)), p / n, "sphere")
        nu, _ = rearrange(m, cap, tol=1e-9)
        return direction_form(nu).gap, cap

    best = (np.inf, None, None)
    for r in r_grid:
        for p in dirs:
            vec = np.concatenate([[np.arctanh(np.clip(r, -0.9, 0.9))], p])
            g, cap = gap_of(vec)
            if g < best[0]:
                best = (g, cap, vec)

    from scipy.optimize import minimize

    res = minimize(
        lambda v: gap_of(v)[0],
        best[2],
        method="Nelder-Mead",
        options={"maxfev": refine_steps, "xatol": 1e-8, "fatol": 1e-12},
    )
    g, cap = gap_of(res.x)
    if g < best[0]:
        best = (g, cap, res.x)
    if best[0] >= eps:
        raise CapScanError(
            f"no spherical cap below gap {eps}",
            best_cap=best[1], best_gap=best[0],
        )
    return best[1], float(best[0])


def sphere_degree_check(n: int, n_targets: int = 6, seed: int = 0) -> dict:
    """Signed preimage counts for the antipodal-reflection direction map.

    The map sends p to 2 (e1, p) p - e1 on the n-sphere.  Every regular
    target has exactly two preimages; for odd n both carry positive
    orientation so the degree is 2, and the projective quotient doubles it
    to 4.  Even n is rejected: the two orientations cancel and the argument
    collapses.
    """
    if n % 2 == 0:
        raise EvenDimensionError("degree diagnostics require odd sphere dimension")
    rng = np.random.default_rng(seed)
    e1 = np.zeros(n + 1)
    e1[0] = 1.0

    def psi(p):
        return 2.0 * p[0] * p - e1

    def signed_count(target):
        total = 0
        for root in _psi_preimages(target, e1):
            total += _orientation_sign(psi, root, target, n)
        return total

    deg_psi = None
    deg_phi = None
    for _ in range(n_targets):
        q = rng.normal(size=n + 1)
        q /= np.linalg.norm(q)
        if abs(abs(q[0]) - 1.0) < 1e-6:
            continue
        count_q = signed_count(q)
        count_mq = signed_count(-q)
        if deg_psi is None:
            deg_psi = count_q
            deg_phi = count_q + count_mq
        elif count_q != deg_psi or count_q + count_mq != deg_phi:
            raise ArithmeticError("degree count is target dependent")
    return {"deg_psi": int(deg_psi), "deg_phi": int(deg_phi)}


def _psi_preimages(q, e1):
    v = e1 + q
    nv = np.linalg.norm(v)
    root = v / nv
    return [root, -root]


def _orientation_sign(psi_map, p, q, n, h=1e-6):
    basis_p = _tangent_basis(p)
    cols = []
    for t in basis_p:
        plus = p + h * t
        plus /= np.linalg.norm(plus)
        minus = p - h * t
        minus /= np.linalg.norm(minus)
        cols.append((psi_map(plus) - psi_map(minus)) / (2.0 * h))
    det_source = np.linalg.det(np.column_stack([p] + list(basis_p)))
    det_target = np.linalg.det(np.column_stack([q] + cols))
    return int(np.sign(det_source * det_target))


def _tangent_basis(p):
    dim = len(p)
    vecs = []
    for e in np.eye(dim):
        v = e - (e @ p) * p
        for u in vecs:
            v = v - (v @ u) * u
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            vecs.append(v / norm)
        if len(vecs) == dim - 1:
            break
    return vecs
