"""Angular stretchings f(z) = |z|^alpha (eta1 + i eta2)(arg z).

Covers pointwise evaluation, Jacobian/distortion factors, the first-order
system eta1' = -alpha k2^{-1} eta2, eta2' = alpha k1 eta1 coupling the profile
to a positive weight pair (k1, k2), shooting for exponents alpha whose
solutions close up 2pi-periodically, and the (k1,k2) <-> (mu0,nu0) algebra.

For piecewise-constant weights every propagation step uses the closed-form
2x2 propagator, so profile values, monodromy matrices, and phase advances are
exact to roundoff; that is what the sharpness tests lean on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .periodic_fields import (
    PIECEWISE,
    SMOOTH,
    TWO_PI,
    AngularGrid,
    PeriodicField,
    field_extrema,
    wrap_angle,
)

__all__ = [
    "KProfile",
    "AngularStretching",
    "RootSearchError",
    "k_from_munu",
    "munu_from_k",
    "eval_stretching",
    "differential_quantities",
    "discriminants",
    "distortion_from_k",
    "solve_system",
    "eval_system_solution",
    "monodromy",
    "phase_advance",
    "find_periodic_alpha",
    "periodic_alpha_table",
    "injectivity_check",
    "sl_weak_residuals",
]


class RootSearchError(RuntimeError):
    """Periodic-exponent search exhausted its alpha window."""


@dataclass(frozen=True, eq=False)
class KProfile:
    """Positive weight pair (k1, k2) on a shared angular grid."""

    k1: PeriodicField
    k2: PeriodicField

    def __post_init__(self):
        if not self.k1.grid.same_layout(self.k2.grid):
            raise ValueError("k1 and k2 must share one grid layout")
        for name, f in (("k1", self.k1), ("k2", self.k2)):
            if not f.is_real:
                raise TypeError(f"{name} must be real")
            lo, _ = field_extrema(f)
            if lo <= 0.0:
                raise ValueError(f"{name} must be strictly positive, min={lo}")

    @classmethod
    def constant(cls, k1: float, k2: float, node_count: int = 2048) -> "KProfile":
        g = AngularGrid.uniform(node_count)
        return cls(PeriodicField.constant(g, k1), PeriodicField.constant(g, k2))

    @classmethod
    def piecewise(cls, breakpoints, k1_pieces, k2_pieces, node_count: int = 2048) -> "KProfile":
        g = AngularGrid.with_breakpoints(node_count, breakpoints)
        return cls(PeriodicField.piecewise(g, k1_pieces), PeriodicField.piecewise(g, k2_pieces))

    @property
    def grid(self) -> AngularGrid:
        return self.k1.grid

    @property
    def is_piecewise(self) -> bool:
        return self.k1.kind == PIECEWISE and self.k2.kind == PIECEWISE

    def bounds(self) -> tuple[float, float]:
        """(min, max) over both weights."""
        lo1, hi1 = field_extrema(self.k1)
        lo2, hi2 = field_extrema(self.k2)
        return min(lo1, lo2), max(hi1, hi2)

    def pieces(self):
        """(lefts, rights, k1 values, k2 values) per breakpoint segment."""
        lefts = self.grid.breakpoints
        rights = np.concatenate([lefts[1:], [TWO_PI]])
        return lefts, rights, self.k1.piece_values(), self.k2.piece_values()


def k_from_munu(mu0: PeriodicField, nu0: PeriodicField) -> KProfile:
    """Weights k1 = (1+mu0+nu0)/(1-mu0-nu0), k2 = (1-mu0+nu0)/(1+mu0-nu0)."""
    if not mu0.grid.same_layout(nu0.grid):
        raise ValueError("mu0 and nu0 must share one grid layout")
    m, n = mu0.values, nu0.values
    if np.iscomplexobj(m) or np.iscomplexobj(n):
        raise TypeError("profiles must be real")
    d1 = 1.0 - m - n
    d2 = 1.0 + m - n
    if np.min(d1) <= 1e-10 or np.min(d2) <= 1e-10:
        raise ValueError("ellipticity violation: |mu0|+|nu0| reaches 1")
    kind = PIECEWISE if (mu0.kind == PIECEWISE and nu0.kind == PIECEWISE) else SMOOTH
    k1 = PeriodicField(mu0.grid, (1.0 + m + n) / d1, kind)
    k2 = PeriodicField(mu0.grid, (1.0 - m + n) / d2, kind)
    return KProfile(k1, k2)


def munu_from_k(k: KProfile) -> tuple[PeriodicField, PeriodicField]:
    """Inverse of k_from_munu; output satisfies |mu0|+|nu0| < 1."""
    a, b = k.k1.values, k.k2.values
    den = 1.0 + a + b + a * b
    mu0 = (a - b) / den
    nu0 = (a * b - 1.0) / den
    if np.max(np.abs(mu0) + np.abs(nu0)) >= 1.0 - 1e-12:
        raise ValueError("recovered (mu0, nu0) violates ellipticity")
    kind = PIECEWISE if k.is_piecewise else SMOOTH
    grid = k.grid
    return PeriodicField(grid, mu0, kind), PeriodicField(grid, nu0, kind)


@dataclass(frozen=True, eq=False)
class AngularStretching:
    """Profile pair with exponent and per-node derivative samples."""

    alpha: float
    eta1: PeriodicField
    eta2: PeriodicField
    deta1: np.ndarray
    deta2: np.ndarray

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.eta1.grid.same_layout(self.eta2.grid):
            raise ValueError("eta1 and eta2 must share one grid layout")
        n = self.eta1.grid.node_count
        for name, d in (("deta1", self.deta1), ("deta2", self.deta2)):
            d = np.asarray(d, dtype=float)
            if d.shape != (n,):
                raise ValueError(f"{name} must have {n} samples")
            object.__setattr__(self, name, d)

    @classmethod
    def identity(cls, node_count: int = 2048) -> "AngularStretching":
        g = AngularGrid.uniform(node_count)
        t = g.nodes
        return cls(
            1.0,
            PeriodicField(g, np.cos(t)),
            PeriodicField(g, np.sin(t)),
            -np.sin(t),
            np.cos(t),
        )

    @classmethod
    def radial(cls, alpha: float, node_count: int = 2048) -> "AngularStretching":
        """|z|^{alpha-1} z: circular profile with exponent alpha."""
        g = AngularGrid.uniform(node_count)
        t = g.nodes
        return cls(
            alpha,
            PeriodicField(g, np.cos(t)),
            PeriodicField(g, np.sin(t)),
            -np.sin(t),
            np.cos(t),
        )

    @property
    def grid(self) -> AngularGrid:
        return self.eta1.grid

    def profile_at(self, theta) -> np.ndarray:
        return self.eta1.eval_at(theta) + 1j * self.eta2.eval_at(theta)


def eval_stretching(s: AngularStretching, z):
    """f(z) = |z|^alpha (eta1 + i eta2)(arg z); linear interp between nodes."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("stretching is evaluated on z != 0 (it extends by 0 at the origin)")
    r = np.abs(z)
    theta = wrap_angle(np.angle(z))
    out = r**s.alpha * s.profile_at(theta)
    return out if out.shape else complex(out)


def _profile_arrays(s: AngularStretching, theta):
    if theta is None:
        return s.eta1.values, s.eta2.values, s.deta1, s.deta2
    t = np.asarray(theta, dtype=float)
    g = s.grid
    d1 = PeriodicField(g, s.deta1, SMOOTH)
    d2 = PeriodicField(g, s.deta2, SMOOTH)
    return s.eta1.eval_at(t), s.eta2.eval_at(t), d1.eval_at(t), d2.eval_at(t)


def discriminants(s: AngularStretching, theta=None):
    """Discriminant of the |Df|^2 quadratic, both algebraic forms.

    Returns (difference-of-squares form, four-square form); they agree
    identically, and the four-square form is the numerically stable one.
    """
    e1, e2, d1, d2 = _profile_arrays(s, theta)
    a2 = s.alpha**2
    trace = a2 * (e1**2 + e2**2) + d1**2 + d2**2
    cross = e1 * d2 - d1 * e2
    diff_form = trace**2 - 4.0 * a2 * cross**2
    four_form = (
        (a2 * e1**2 - d2**2) ** 2
        + (a2 * e2**2 - d1**2) ** 2
        + 2.0 * (a2 * e1 * e2 + d1 * d2) ** 2
        + 2.0 * a2 * (e1 * d1 + e2 * d2) ** 2
    )
    return diff_form, four_form


def differential_quantities(s: AngularStretching, theta=None):
    """r-independent factors (jacobian, |Df|^2, distortion) at angles theta.

    jacobian factor: alpha (eta1 eta2' - eta1' eta2); |Df|^2 factor:
    (trace + sqrt(discriminant))/2; distortion: their quotient.  Warns when
    the jacobian factor is not strictly positive somewhere (orientation).
    """
    e1, e2, d1, d2 = _profile_arrays(s, theta)
    a = s.alpha
    jac = a * (e1 * d2 - d1 * e2)
    _, disc = discriminants(s, theta)
    grad_sq = 0.5 * (a**2 * (e1**2 + e2**2) + d1**2 + d2**2 + np.sqrt(disc))
    if np.any(jac <= 0):
        warnings.warn("jacobian factor <= 0: map is not sense-preserving there", stacklevel=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = grad_sq / jac
    return jac, grad_sq, dist


def distortion_from_k(k: KProfile, eta1, eta2):
    """Distortion of a system solution written in (k1, k2, eta) only.

    Valid on solutions of the coupled system, where the derivative terms
    reduce through eta1' = -alpha k2^{-1} eta2, eta2' = alpha k1 eta1.
    """
    k1, k2 = k.k1.values, 1.0 / k.k2.values
    e1s, e2s = np.asarray(eta1) ** 2, np.asarray(eta2) ** 2
    root = np.sqrt(
        (1.0 - k1**2) ** 2 * e1s**2
        + (1.0 - k2**2) ** 2 * e2s**2
        + 2.0 * ((1.0 - k1 * k2) ** 2 + (k1 - k2) ** 2) * e1s * e2s
    )
    return ((1.0 + k1**2) * e1s + (1.0 + k2**2) * e2s + root) / (2.0 * (k1 * e1s + k2 * e2s))


# ---------------------------------------------------------------------------
# propagation


def _piece_propagator(a: float, b: float, h):
    """exp(h [[0, -a], [b, 0]]) for a, b > 0: rotation-like."""
    w = math.sqrt(a * b)
    wh = np.asarray(w * h)
    c, s = np.cos(wh), np.sin(wh)
    return c, -(a / w) * s, (b / w) * s  # entries (11=22, 12, 21)


def _piece_rates(k: KProfile, alpha: float):
    lefts, rights, k1v, k2v = k.pieces()
    return lefts, rights, alpha / k2v, alpha * k1v


def _rk4_nodes(k: KProfile, alpha: float, v0, substeps: int = 8):
    """Fixed-step RK4 node to node for smooth weights; returns (2, n+1) states."""
    g = k.grid
    thetas = np.concatenate([g.nodes, [g.nodes[0] + TWO_PI]])
    out = np.empty((2, thetas.size))
    out[:, 0] = v0

    def rhs(t, v):
        k1 = float(k.k1.eval_at(t))
        k2 = float(k.k2.eval_at(t))
        return np.array([-alpha / k2 * v[1], alpha * k1 * v[0]])

    v = np.array(v0, dtype=float)
    for j in range(thetas.size - 1):
        h = (thetas[j + 1] - thetas[j]) / substeps
        t = thetas[j]
        for _ in range(substeps):
            f1 = rhs(t, v)
            f2 = rhs(t + h / 2, v + h / 2 * f1)
            f3 = rhs(t + h / 2, v + h / 2 * f2)
            f4 = rhs(t + h, v + h * f3)
            v = v + h / 6 * (f1 + 2 * f2 + 2 * f3 + f4)
            t += h
        out[:, j + 1] = v
    return out


def solve_system(k: KProfile, alpha: float, initial=None) -> AngularStretching:
    """Integrate the coupled system over [0, 2pi] on k's grid.

    Piecewise-constant weights use the exact propagator; smooth weights fall
    back to fixed-step RK4 aligned to the grid.  Derivative samples come from
    the system right-hand side, not finite differences.  With no explicit
    initial data the solution starts at (1, 0) and is rescaled so
    max(|eta1|, |eta2|) = 1.
    """
    if not (alpha > 0):
        raise ValueError(f"alpha must be positive, got {alpha}")
    normalize = initial is None
    v0 = np.array([1.0, 0.0]) if initial is None else np.asarray(initial, dtype=float)
    if v0.shape != (2,) or not np.any(v0):
        raise ValueError("initial data must be a nonzero pair")
    g = k.grid
    if k.is_piecewise:
        e1, e2, _, _ = eval_system_solution(k, alpha, v0, g.nodes)
    else:
        states = _rk4_nodes(k, alpha, v0)
        e1, e2 = states[0, :-1], states[1, :-1]
    d1 = -alpha / k.k2.values * e2
    d2 = alpha * k.k1.values * e1
    if normalize:
        scale = max(np.max(np.abs(e1)), np.max(np.abs(e2)))
        e1, e2, d1, d2 = e1 / scale, e2 / scale, d1 / scale, d2 / scale
    return AngularStretching(
        alpha, PeriodicField(g, e1, SMOOTH), PeriodicField(g, e2, SMOOTH), d1, d2
    )


def eval_system_solution(k: KProfile, alpha: float, initial, thetas):
    """Exact solution samples at arbitrary angles (piecewise-constant k only).

    Returns (eta1, eta2, eta1', eta2') arrays.  Derivatives at a breakpoint
    take the right-limit weights, matching the segment convention.
    """
    if not k.is_piecewise:
        raise ValueError("exact evaluation needs piecewise-constant weights")
    lefts, rights, av, bv = _piece_rates(k, alpha)
    # anchor state at each piece start
    anchors = np.empty((2, lefts.size))
    v = np.asarray(initial, dtype=float).copy()
    for j in range(lefts.size):
        anchors[:, j] = v
        c, p12, p21 = _piece_propagator(av[j], bv[j], rights[j] - lefts[j])
        v = np.array([c * v[0] + p12 * v[1], p21 * v[0] + c * v[1]])
    t = wrap_angle(np.asarray(thetas, dtype=float))
    seg = np.clip(np.searchsorted(lefts, t + 1e-12, side="right") - 1, 0, lefts.size - 1)
    e1 = np.empty_like(t)
    e2 = np.empty_like(t)
    for j in range(lefts.size):
        m = seg == j
        if not np.any(m):
            continue
        c, p12, p21 = _piece_propagator(av[j], bv[j], t[m] - lefts[j])
        e1[m] = c * anchors[0, j] + p12 * anchors[1, j]
        e2[m] = p21 * anchors[0, j] + c * anchors[1, j]
    d1 = -av[seg] * e2
    d2 = bv[seg] * e1
    return e1, e2, d1, d2


def monodromy(k: KProfile, alpha: float) -> np.ndarray:
    """Fundamental matrix over one period, Phi(2pi); det = 1 up to roundoff."""
    if k.is_piecewise:
        lefts, rights, av, bv = _piece_rates(k, alpha)
        P = np.eye(2)
        for j in range(lefts.size):
            c, p12, p21 = _piece_propagator(av[j], bv[j], rights[j] - lefts[j])
            P = np.array([[c, p12], [p21, c]]) @ P
        return P
    c1 = _rk4_nodes(k, alpha, (1.0, 0.0))[:, -1]
    c2 = _rk4_nodes(k, alpha, (0.0, 1.0))[:, -1]
    return np.column_stack([c1, c2])


def phase_advance(k: KProfile, alpha: float, phi0):
    """Unwrapped advance of arg(eta1 + i eta2) over one period.

    Strictly increasing in alpha (the phase obeys phi' = alpha (k1 cos^2 phi
    + k2^{-1} sin^2 phi) > 0), which is what the exponent search bisects on.
    Piecewise weights: exact via per-piece elliptic-rotation bookkeeping.
    """
    phi0 = np.asarray(phi0, dtype=float)
    if k.is_piecewise:
        lefts, rights, av, bv = _piece_rates(k, alpha)
        v1, v2 = np.cos(phi0), np.sin(phi0)
        total = np.zeros_like(phi0)
        for j in range(lefts.size):
            a, b = av[j], bv[j]
            h = rights[j] - lefts[j]
            w = math.sqrt(a * b)
            c, s = math.cos(w * h), math.sin(w * h)
            u1 = c * v1 - (a / w) * s * v2
            u2 = (b / w) * s * v1 + c * v2
            sa, sb = math.sqrt(a), math.sqrt(b)
            # |arg v - arg(scaled v)| < pi/2: same quadrant, wrap is safe
            c0 = np.arctan2(v2, v1) - np.arctan2(sa * v2, sb * v1)
            c0 = (c0 + np.pi) % TWO_PI - np.pi
            c1 = np.arctan2(u2, u1) - np.arctan2(sa * u2, sb * u1)
            c1 = (c1 + np.pi) % TWO_PI - np.pi
            total = total + w * h + c1 - c0
            v1, v2 = u1, u2
        return total if total.shape else float(total)

    # smooth weights: integrate the scalar phase equation directly
    g = k.grid
    thetas = np.concatenate([g.nodes, [g.nodes[0] + TWO_PI]])
    k1n = np.concatenate([k.k1.values, [k.k1.values[0]]])
    k2n = np.concatenate([k.k2.values, [k.k2.values[0]]])

    def rate(tl, tr, kl, kr, t, phi):
        wgt = (t - tl) / (tr - tl)
        kk1 = (1 - wgt) * kl[0] + wgt * kr[0]
        kk2 = (1 - wgt) * kl[1] + wgt * kr[1]
        return alpha * (kk1 * np.cos(phi) ** 2 + np.sin(phi) ** 2 / kk2)

    phi = phi0.astype(float).copy() if phi0.shape else np.array([float(phi0)])
    sub = 8
    for j in range(thetas.size - 1):
        tl, tr = thetas[j], thetas[j + 1]
        kl = (k1n[j], k2n[j])
        kr = (k1n[j + 1], k2n[j + 1])
        h = (tr - tl) / sub
        t = tl
        for _ in range(sub):
            f1 = rate(tl, tr, kl, kr, t, phi)
            f2 = rate(tl, tr, kl, kr, t + h / 2, phi + h / 2 * f1)
            f3 = rate(tl, tr, kl, kr, t + h / 2, phi + h / 2 * f2)
            f4 = rate(tl, tr, kl, kr, t + h, phi + h * f3)
            phi = phi + h / 6 * (f1 + 2 * f2 + 2 * f3 + f4)
            t += h
    adv = phi - (phi0 if phi0.shape else float(phi0))
    return adv if phi0.shape else float(adv[0])


def _advance_extremum(k: KProfile, alpha: float, want_max: bool) -> float:
    """max or min over start directions of the one-period phase advance.

    The end direction depends on the start direction with derivative
    1/|Phi v|^2 (unimodular flow), so the advance is extremal exactly where
    |Phi v| = 1: on the intersection of the unit circle with the ellipse
    v' Phi'Phi v = 1.  That gives the two candidate directions in closed
    form; no line search.
    """
    m = monodromy(k, alpha)
    q = m.T @ m
    evals, evecs = np.linalg.eigh(q)
    lam0, lam1 = float(evals[0]), float(evals[1])
    if lam1 - 1.0 < 1e-13 or 1.0 - lam0 < 1e-13:
        # |Phi v| = 1 identically (rotation): advance independent of phi0
        return float(phase_advance(k, alpha, np.array(0.0)))
    # unit vector c*e0 + s*e1 with lam0 c^2 + lam1 s^2 = 1
    s2 = (1.0 - lam0) / (lam1 - lam0)
    c = math.sqrt(1.0 - s2)
    s = math.sqrt(s2)
    dirs = np.stack([c * evecs[:, 0] + s * evecs[:, 1],
                     c * evecs[:, 0] - s * evecs[:, 1]])
    phis = np.arctan2(dirs[:, 1], dirs[:, 0])
    vals = phase_advance(k, alpha, phis)
    return float(np.max(vals) if want_max else np.min(vals))


def _edge_root(k: KProfile, winding: int, want_max: bool, alpha_max: float) -> float:
    """alpha where the extremal phase advance equals 2 pi winding."""
    target = TWO_PI * winding
    vmin_field = np.minimum(k.k1.values, 1.0 / k.k2.values)
    vmax_field = np.maximum(k.k1.values, 1.0 / k.k2.values)
    h = k.grid.spacings()
    vmin = float(np.sum(h * vmin_field))
    vmax = float(np.sum(h * vmax_field))
    lo = 0.9 * target / vmax
    hi = 1.1 * target / vmin
    if lo > alpha_max:
        raise RootSearchError(
            f"winding-{winding} root lies above alpha_max={alpha_max:g} "
            f"(needs alpha >= {target / vmax:g})"
        )
    hi = min(hi, alpha_max)

    def g(al):
        return _advance_extremum(k, al, want_max) - target

    glo, ghi = g(lo), g(hi)
    while glo > 0.0:
        lo *= 0.5
        glo = g(lo)
    if ghi < 0.0:
        raise RootSearchError(
            f"winding-{winding} root not bracketed in ({lo:g}, {hi:g}]: "
            f"advance extremum reaches {ghi + target:g} < {target:g}"
        )
    return float(brentq(g, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps))


def periodic_alpha_table(k: KProfile, branches: int, alpha_max: float = 50.0):
    """Distinct exponents with a 2pi-periodic solution, smallest first.

    Each winding number contributes the two edges of its instability interval
    (which coincide when the interval is degenerate, e.g. constant weights).
    Entries are dicts {alpha, winding, edge}.
    """
    table = []
    w = 0
    while len(table) < branches:
        w += 1
        left = _edge_root(k, w, want_max=True, alpha_max=alpha_max)
        right = _edge_root(k, w, want_max=False, alpha_max=alpha_max)
        if right - left <= 1e-10 * max(1.0, right):
            table.append({"alpha": left, "winding": w, "edge": "degenerate"})
        else:
            table.append({"alpha": left, "winding": w, "edge": "left"})
            table.append({"alpha": right, "winding": w, "edge": "right"})
    return table[:branches] if len(table) > branches else table


def find_periodic_alpha(k: KProfile, branch: int = 1, alpha_max: float = 50.0) -> float:
    """n-th alpha (increasing) with Floquet multiplier 1, i.e. tr Phi = 2.

    Roots are located through the phase advance of the solution direction,
    which crosses 2 pi n transversally in alpha even where tr Phi - 2 only
    touches zero; that keeps degenerate (constant-weight) roots at full
    precision.
    """
    if branch < 1:
        raise ValueError(f"branch must be >= 1, got {branch}")
    table = periodic_alpha_table(k, branch, alpha_max=alpha_max)
    if len(table) < branch:
        raise RootSearchError(
            f"only {len(table)} periodic exponents below alpha_max={alpha_max:g}"
        )
    return float(table[branch - 1]["alpha"])


def injectivity_check(s: AngularStretching):
    """Certificate for injectivity of the stretching.

    Conditions: profile vector never vanishes, jacobian factor of constant
    sign, and minimal period 2pi (winding +-1 once the phase is monotone).
    Returns (bool, certificate dict naming any failing condition).
    """
    e1, e2 = s.eta1.values, s.eta2.values
    mod = e1**2 + e2**2
    cert: dict = {}
    ok = True
    if np.min(mod) <= 1e-14 * np.max(mod):
        ok = False
        cert["vanishing_node"] = int(np.argmin(mod))
    jac = s.alpha * (e1 * s.deta2 - s.deta1 * e2)
    pos, neg = np.any(jac > 0), np.any(jac < 0)
    if pos and neg or not (pos or neg):
        ok = False
        cert["jacobian_sign_change_node"] = int(np.argmin(np.abs(jac)))
    phases = np.unwrap(np.arctan2(e2, e1))
    closing = np.arctan2(e2[0], e1[0]) - np.arctan2(e2[-1], e1[-1])
    closing = (closing + np.pi) % TWO_PI - np.pi
    winding = (phases[-1] - phases[0] + closing) / TWO_PI
    cert["winding"] = float(winding)
    if abs(abs(winding) - 1.0) > 1e-6:
        ok = False
        cert["minimal_period"] = TWO_PI / max(abs(winding), 1e-12)
    return ok, cert


def _gauss_rule(n: int = 5):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w  # on [0, 1]


def sl_weak_residuals(k: KProfile, s: AngularStretching, component: int = 1):
    """Weak residual of the Sturm-Liouville form against nodal hat functions.

    component 1: d/dtheta(k2 eta1') + alpha^2 k1 eta1 = 0;
    component 2: d/dtheta(k1^{-1} eta2') + alpha^2 k2^{-1} eta2 = 0.
    Hats sit at the interior nodes only: profiles of non-periodic exponents
    jump at the cut angle, and closing up is monodromy's business anyway.
    Piecewise weights integrate with per-cell Gauss(5) on the exact solution;
    smooth weights use node trapezoid (O(h^2)).  Returns (residual vector,
    normalized max residual).
    """
    g = s.grid
    nodes = g.nodes
    n = nodes.size
    thetas_ext = np.concatenate([nodes, [nodes[0] + TWO_PI]])
    h = np.diff(thetas_ext)
    a2 = s.alpha**2

    if k.is_piecewise:
        gx, gw = _gauss_rule(5)
        # all Gauss points, cell by cell
        pts = (thetas_ext[:-1, None] + h[:, None] * gx[None, :]).ravel()
        v0 = np.array([s.eta1.values[0], s.eta2.values[0]])
        e1, e2, d1, d2 = eval_system_solution(k, s.alpha, v0, pts)
        k1 = k.k1.eval_at(pts)
        k2 = k.k2.eval_at(pts)
        if component == 1:
            flux = (k2 * d1).reshape(n, -1)
            load = (a2 * k1 * e1).reshape(n, -1)
        else:
            flux = (d2 / k1).reshape(n, -1)
            load = (a2 * e2 / k2).reshape(n, -1)
        wts = gw[None, :] * h[:, None]
        # hat_j rises on cell j-1, falls on cell j
        rise = np.sum(wts * gx[None, :] * load, axis=1)
        fall = np.sum(wts * (1.0 - gx[None, :]) * load, axis=1)
        int_flux = np.sum(wts * flux, axis=1)
        res = (
            np.roll(rise, 1)
            + fall
            - np.roll(int_flux, 1) / np.roll(h, 1)
            + int_flux / h
        )[1:]
        scale = np.max(np.abs(int_flux) / h) + np.max(np.abs(rise + fall))
    else:
        if component == 1:
            flux_n = k.k2.values * s.deta1
            load_n = a2 * k.k1.values * s.eta1.values
        else:
            flux_n = s.deta2 / k.k1.values
            load_n = a2 * s.eta2.values / k.k2.values
        flux_mid = 0.5 * (flux_n + np.roll(flux_n, -1))
        load_cell = 0.5 * h * load_n + 0.5 * np.roll(h, 1) * load_n
        # node samples cannot reach into the cut cell, so the final hat
        # (whose support includes it) is skipped as well
        res = (-np.roll(flux_mid, 1) + flux_mid + load_cell)[1:-1]
        scale = np.max(np.abs(flux_mid)) + np.max(np.abs(load_cell))
    return res, float(np.max(np.abs(res)) / scale)
