"""Independent numerical checks: first-order equation residuals, weak-form
residuals for the divergence reduction, and empirical exponent measurement.

Everything here works on annuli; the maps under test are merely Holder at the
origin, so behavior near 0 is measured by the oscillation fit instead of by
derivatives.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .periodic_fields import TWO_PI, AngularGrid, wrap_angle
from .reduction import BeltramiPair, CoefficientMatrixField
from .stretching import AngularStretching, eval_stretching

__all__ = [
    "PolarGrid",
    "ResidualReport",
    "beltrami_residual",
    "weak_residual_vector",
    "weak_form_residual",
    "empirical_holder",
]


@dataclass(frozen=True, eq=False)
class PolarGrid:
    """Annulus mesh: geometric radii, angular nodes, and arcs to skip when
    derivatives are evaluated pointwise (coefficient jump neighborhoods)."""

    radii: np.ndarray
    angles: AngularGrid
    excluded_arcs: tuple = ()

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise ValueError("need at least 3 radii")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be positive and increasing")
        object.__setattr__(self, "radii", r)

    @classmethod
    def annulus(
        cls,
        r_min: float = 0.25,
        r_max: float = 1.0,
        radius_count: int = 24,
        node_count: int = 512,
        breakpoints=None,
        halo: float | None = None,
    ) -> "PolarGrid":
        radii = np.geomspace(r_min, r_max, radius_count)
        if breakpoints is None:
            angles = AngularGrid.uniform(node_count)
            arcs = ()
        else:
            angles = AngularGrid.with_breakpoints(node_count, breakpoints)
            h = halo if halo is not None else 1.5 * TWO_PI / node_count
            arcs = tuple((b - h, b + h) for b in angles.breakpoints)
        return cls(radii, angles, arcs)

    def refined(self) -> "PolarGrid":
        """Double both resolutions, keeping extent and excluded arcs."""
        radii = np.geomspace(self.radii[0], self.radii[-1], 2 * self.radii.size - 1)
        angles = AngularGrid.with_breakpoints(2 * self.angles.node_count, self.angles.breakpoints)
        return PolarGrid(radii, angles, self.excluded_arcs)

    def angle_mask(self, thetas) -> np.ndarray:
        """True where an angle is clear of every excluded arc."""
        t = wrap_angle(np.asarray(thetas, dtype=float))
        keep = np.ones(t.shape, dtype=bool)
        for lo, hi in self.excluded_arcs:
            d = wrap_angle(t - lo)
            keep &= ~(d < (hi - lo) % TWO_PI + 1e-15)
        return keep


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    mean_residual: float
    resolution: tuple[int, int]
    slope: float | None = None


# ---------------------------------------------------------------------------
# first-order equation residual


def _closed_form_derivatives(s: AngularStretching, radii):
    """(z, dbar f, d f) on the tensor grid radii x native profile nodes."""
    t = s.grid.nodes
    P = s.eta1.values + 1j * s.eta2.values
    dP = s.deta1 + 1j * s.deta2
    r = np.asarray(radii, dtype=float)[:, None]
    pref = r ** (s.alpha - 1.0)
    e_pos = np.exp(1j * t)[None, :]
    dbar = 0.5 * e_pos * pref * (s.alpha * P + 1j * dP)[None, :]
    dplus = 0.5 * np.conj(e_pos) * pref * (s.alpha * P - 1j * dP)[None, :]
    return r * e_pos, dbar, dplus, t


def _fd_derivatives(f, grid: PolarGrid):
    t = grid.angles.nodes
    r = grid.radii
    z = r[:, None] * np.exp(1j * t)[None, :]
    F = np.asarray(f(z), dtype=complex)
    f_r = np.gradient(F, r, axis=0, edge_order=2)
    t_ext = np.concatenate([[t[-1] - TWO_PI], t, [t[0] + TWO_PI]])
    F_ext = np.concatenate([F[:, -1:], F, F[:, :1]], axis=1)
    f_t = np.gradient(F_ext, t_ext, axis=1, edge_order=2)[:, 1:-1]
    e_pos = np.exp(1j * t)[None, :]
    dbar = 0.5 * e_pos * (f_r + 1j * f_t / r[:, None])
    dplus = 0.5 * np.conj(e_pos) * (f_r - 1j * f_t / r[:, None])
    return z, dbar, dplus, t


def beltrami_residual(f, pair: BeltramiPair, grid: PolarGrid | None = None) -> ResidualReport:
    """Normalized residual of the first-order equation on an annulus.

    Angular stretchings use exact polar derivatives at their native nodes
    (machine-accurate, including at coefficient jumps, by the shared
    right-limit convention).  Plain callables fall back to second-order
    finite differences, with jump neighborhoods excluded.
    """
    if grid is None:
        bks = pair.mu0.grid.breakpoints if pair.is_angular else None
        grid = PolarGrid.annulus(breakpoints=bks)
    if isinstance(f, AngularStretching):
        z, dbar, dplus, t = _closed_form_derivatives(f, grid.radii)
    elif callable(f):
        if pair.is_angular:
            counts = np.bincount(
                [pair.mu0.grid.segment_of(x) for x in grid.angles.nodes],
                minlength=pair.mu0.grid.breakpoints.size,
            )
            if np.min(counts) < 3:
                raise ValueError("grid too coarse: fewer than 3 nodes in a smooth piece")
        z, dbar, dplus, t = _fd_derivatives(f, grid)
    else:
        raise TypeError("f must be an AngularStretching or a callable z -> f(z)")
    mu = np.asarray(pair.mu_fn(z), dtype=complex)
    nu = np.asarray(pair.nu_fn(z), dtype=complex)
    res = dbar - mu * dplus - nu * np.conj(dplus)
    keep = grid.angle_mask(t)
    scale = np.max(np.abs(dplus[:, keep])) + np.max(np.abs(dbar[:, keep]))
    r_abs = np.abs(res[:, keep])
    return ResidualReport(
        max_residual=float(np.max(r_abs) / scale),
        mean_residual=float(np.mean(r_abs) / scale),
        resolution=(grid.radii.size, grid.angles.node_count),
    )


# ---------------------------------------------------------------------------
# weak form on the annulus


def weak_residual_vector(u_vals, a: CoefficientMatrixField, grid: PolarGrid):
    """Assembled weak residuals int A grad(u_h) . grad(hat) per mesh vertex.

    The annulus is triangulated with straight triangles on the polar vertices
    and u is interpolated linearly per triangle, so planar affine functions
    are reproduced exactly.  Returns (residual, normalizer) arrays over all
    vertices; the normalizer accumulates absolute per-triangle contributions
    and measures how much cancellation the residual represents.  The residual
    array is linear in u and homogeneous of degree one in A.
    """
    r = grid.radii
    t = grid.angles.nodes
    nr, na = r.size, t.size
    U = np.asarray(u_vals, dtype=float)
    if U.shape != (nr, na):
        raise ValueError(f"samples must have shape {(nr, na)}, got {U.shape}")
    x = r[:, None] * np.cos(t)[None, :]
    y = r[:, None] * np.sin(t)[None, :]
    rows = np.arange(nr - 1)[:, None] * np.ones(na, dtype=int)[None, :]
    cols = np.ones(nr - 1, dtype=int)[:, None] * np.arange(na)[None, :]
    cols1 = (cols + 1) % na
    quad = [(rows, cols), (rows + 1, cols), (rows, cols1), (rows + 1, cols1)]
    # each quad splits along the outward diagonal, both triangles oriented
    # counterclockwise
    triangles = ((0, 1, 3), (0, 3, 2))
    R = np.zeros((nr, na))
    S = np.zeros((nr, na))
    for tri in triangles:
        idx = [quad[k] for k in tri]
        xs = [x[i] for i in idx]
        ys = [y[i] for i in idx]
        us = [U[i] for i in idx]
        two_area = (xs[1] - xs[0]) * (ys[2] - ys[0]) - (ys[1] - ys[0]) * (xs[2] - xs[0])
        gx = [(ys[1] - ys[2]) / two_area, (ys[2] - ys[0]) / two_area, (ys[0] - ys[1]) / two_area]
        gy = [(xs[2] - xs[1]) / two_area, (xs[0] - xs[2]) / two_area, (xs[1] - xs[0]) / two_area]
        gux = sum(u * g for u, g in zip(us, gx))
        guy = sum(u * g for u, g in zip(us, gy))
        zc = (xs[0] + xs[1] + xs[2] + 1j * (ys[0] + ys[1] + ys[2])) / 3.0
        a11, a12, a21, a22 = a.entries(zc)
        if np.min(a11) <= 0 or np.min(a11 * a22 - a12 * a21) <= 0:
            raise ValueError("coefficient matrix is not positive definite on the mesh")
        fx = a11 * gux + a12 * guy
        fy = a21 * gux + a22 * guy
        area = 0.5 * two_area
        flux_mag = np.hypot(fx, fy)
        for k in range(3):
            np.add.at(R, idx[k], area * (fx * gx[k] + fy * gy[k]))
            np.add.at(S, idx[k], area * flux_mag * np.hypot(gx[k], gy[k]))
    return R, S


def weak_form_residual(
    u,
    a: CoefficientMatrixField,
    grid: PolarGrid,
    refinements: int = 0,
) -> ResidualReport:
    """Discrete weak residual of div(A grad u) = 0 against interior hats.

    u is either a callable on complex points or a samples array matching the
    grid.  Test functions vanish on the annulus boundary, so only interior
    radial nodes carry residuals; jumps in A are fine (the integral
    formulation sees them).  With refinements > 0 and callable u, the mesh is
    doubled that many times and the report carries the log-log slope.
    """
    if a.k1 is not None:
        bk = a.k1.grid.breakpoints
        gbk = grid.angles.breakpoints
        if any(np.min(np.abs(wrap_angle(b - gbk + np.pi) - np.pi)) > 1e-9 for b in bk):
            warnings.warn("coefficient breakpoints not aligned with the angular mesh",
                          stacklevel=2)

    def run(g: PolarGrid):
        if callable(u):
            z = g.radii[:, None] * np.exp(1j * g.angles.nodes)[None, :]
            vals = np.asarray(u(z), dtype=float)
        else:
            vals = u
        R, S = weak_residual_vector(vals, a, g)
        interior = slice(1, g.radii.size - 1)
        rel = np.abs(R[interior]) / np.max(S[interior])
        return float(np.max(rel)), float(np.mean(rel))

    mx, mean = run(grid)
    slope = None
    if refinements > 0:
        if not callable(u):
            raise ValueError("refinement study needs a callable to resample")
        sizes = [grid.angles.node_count]
        values = [mx]
        g = grid
        for _ in range(refinements):
            g = g.refined()
            m, _ = run(g)
            sizes.append(g.angles.node_count)
            values.append(m)
        slope = float(
            -np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(values)), 1)[0]
        )
    return ResidualReport(
        max_residual=mx,
        mean_residual=mean,
        resolution=(grid.radii.size, grid.angles.node_count),
        slope=slope,
    )


# ---------------------------------------------------------------------------
# exponent from oscillation decay


def empirical_holder(f, scales: int = 10, node_count: int = 512):
    """Fit of log max-oscillation over circles against log radius.

    Radii are dyadic, 2^{-1} .. 2^{-scales}.  Returns (slope, diagnostics)
    where diagnostics carries the fit quality and raw data.  For maps of the
    form r^alpha * profile the slope recovers alpha.
    """
    if scales < 4:
        raise ValueError(f"need at least 4 dyadic scales, got {scales}")
    radii = 2.0 ** -np.arange(1, scales + 1)
    t = TWO_PI * np.arange(node_count) / node_count
    osc = np.empty(radii.size)
    for i, r in enumerate(radii):
        z = r * np.exp(1j * t)
        vals = eval_stretching(f, z) if isinstance(f, AngularStretching) else f(z)
        osc[i] = np.max(np.abs(vals))
    if np.any(osc <= 0):
        raise ValueError("oscillation vanished on a circle; cannot fit an exponent")
    x, y = np.log(radii), np.log(osc)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    diagnostics = {
        "r_squared": 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0,
        "radii": radii,
        "oscillation": osc,
        "intercept": float(intercept),
    }
    return float(slope), diagnostics
