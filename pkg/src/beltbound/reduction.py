"""Coefficient pairs (mu, nu), elliptic matrix fields, and the reduction
between the first-order equation and its divergence-form counterparts.

A pair carries vectorized evaluators z -> mu(z), nu(z); when it was built
from angular profiles (mu = -mu0(arg z) z/zbar, nu = -nu0(arg z)) it also
keeps the profiles, which lets circle restrictions stay piecewise-exact.
Matrix fields keep the rotational form R(theta) diag(k1,k2) R(theta)^T
alongside entry evaluators for the same reason.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .periodic_fields import (
    PIECEWISE,
    SMOOTH,
    AngularGrid,
    CircleSpec,
    PeriodicField,
    field_extrema,
    merge_breakpoints,
    wrap_angle,
)
from .stretching import KProfile, k_from_munu, munu_from_k

__all__ = [
    "EllipticityError",
    "BeltramiPair",
    "PairOnCircle",
    "CoefficientMatrixField",
    "MatrixOnCircle",
    "MatrixReduction",
    "beltrami_to_matrices",
    "matrix_to_beltrami",
    "normalize_matrix",
    "angular_to_matrix",
]

_ELL_TOL = 1e-10


class EllipticityError(ValueError):
    """|mu| + |nu| reaches 1 (or a matrix field loses positivity)."""


def _sample_lattice(radius: float = 1.0, n_r: int = 12, n_t: int = 96) -> np.ndarray:
    r = np.geomspace(0.02, 0.98, n_r) * radius
    t = 2 * np.pi * np.arange(n_t) / n_t
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


@dataclass(frozen=True, eq=False)
class BeltramiPair:
    """Coefficients of d_bar f = mu df + nu conj(df) with recorded ellipticity.

    kappa is the (sampled) sup of |mu| + |nu|; construction rejects
    kappa >= 1 - 1e-10 instead of clamping.
    """

    mu_fn: Callable
    nu_fn: Callable
    real_nu: bool
    kappa: float
    mu0: PeriodicField | None = None
    nu0: PeriodicField | None = None
    constants: tuple | None = None  # (mu, nu) when spatially constant

    def __post_init__(self):
        if not np.isfinite(self.kappa):
            raise EllipticityError("non-finite coefficient samples")
        if self.kappa >= 1.0 - _ELL_TOL:
            raise EllipticityError(
                f"ellipticity violation: sup(|mu|+|nu|) = {self.kappa:.12g} >= 1"
            )

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_constant(cls, mu: complex, nu: complex) -> "BeltramiPair":
        mu, nu = complex(mu), complex(nu)

        def mu_fn(z):
            return np.full(np.shape(z), mu)

        def nu_fn(z):
            return np.full(np.shape(z), nu)

        return cls(
            mu_fn,
            nu_fn,
            real_nu=(nu.imag == 0.0),
            kappa=abs(mu) + abs(nu),
            constants=(mu, nu),
        )

    @classmethod
    def from_angular(cls, mu0: PeriodicField, nu0: PeriodicField) -> "BeltramiPair":
        """mu(z) = -mu0(arg z) z/zbar, nu(z) = -nu0(arg z); real profiles."""
        if not (mu0.is_real and nu0.is_real):
            raise TypeError("angular profiles must be real")
        if not mu0.grid.same_layout(nu0.grid):
            raise ValueError("mu0 and nu0 must share one grid layout")

        def mu_fn(z):
            z = np.asarray(z, dtype=complex)
            theta = wrap_angle(np.angle(z))
            return -mu0.eval_at(theta) * np.exp(2j * theta)

        def nu_fn(z):
            theta = wrap_angle(np.angle(np.asarray(z, dtype=complex)))
            return -nu0.eval_at(theta) + 0j

        kappa = float(np.max(np.abs(mu0.values) + np.abs(nu0.values)))
        return cls(mu_fn, nu_fn, real_nu=True, kappa=kappa, mu0=mu0, nu0=nu0)

    @classmethod
    def from_profiles(cls, breakpoints, mu0_pieces, nu0_pieces, node_count: int = 2048) -> "BeltramiPair":
        """Piecewise-constant angular pair from per-arc values."""
        g = AngularGrid.with_breakpoints(node_count, breakpoints)
        return cls.from_angular(
            PeriodicField.piecewise(g, mu0_pieces), PeriodicField.piecewise(g, nu0_pieces)
        )

    @classmethod
    def from_callables(cls, mu_fn, nu_fn, real_nu: bool | None = None, domain_radius: float = 1.0) -> "BeltramiPair":
        zs = _sample_lattice(domain_radius)
        mu_s = np.asarray(mu_fn(zs), dtype=complex)
        nu_s = np.asarray(nu_fn(zs), dtype=complex)
        if real_nu is None:
            real_nu = bool(np.max(np.abs(nu_s.imag)) < 1e-14)
        kappa = float(np.max(np.abs(mu_s) + np.abs(nu_s)))
        return cls(mu_fn, nu_fn, real_nu=real_nu, kappa=kappa)

    @classmethod
    def radial_stretch(cls, alpha: float, node_count: int = 2048) -> "BeltramiPair":
        """Coefficients of |z|^{alpha-1} z: mu0 = (1-alpha)/(1+alpha), nu = 0."""
        if not (0 < alpha <= 1):
            raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
        g = AngularGrid.uniform(node_count)
        mu0 = PeriodicField.constant(g, (1.0 - alpha) / (1.0 + alpha))
        return cls.from_angular(mu0, PeriodicField.constant(g, 0.0))

    # -- derived quantities -------------------------------------------------

    @property
    def is_angular(self) -> bool:
        return self.mu0 is not None

    def distortion_bound(self) -> float:
        """sup of (1 + |mu| + |nu|)/(1 - |mu| - |nu|) over the samples."""
        return (1.0 + self.kappa) / (1.0 - self.kappa)

    def on_circle(self, circle: CircleSpec, extra_breakpoints=None) -> "PairOnCircle":
        """Coefficient samples along a circle; see PairOnCircle.

        extra_breakpoints forces additional grid breakpoints (weight-arc
        boundaries, typically) so downstream arc reductions stay exact.
        """
        extra = () if extra_breakpoints is None else (extra_breakpoints,)
        if self.is_angular and circle.through_origin():
            raise ValueError("angular coefficients: circle must not pass through the origin")
        if self.is_angular and circle.origin_centered:
            bks = merge_breakpoints(self.mu0.grid.breakpoints, self.nu0.grid.breakpoints, *extra)
            grid = circle.grid(bks)
            t = grid.nodes
            n = np.exp(1j * t)
            m0 = self.mu0.eval_at(t)
            n0 = self.nu0.eval_at(t)
            mu = PeriodicField(grid, -m0 * np.exp(2j * t), SMOOTH)
            nu = PeriodicField(grid, -n0 + 0j, self.nu0.kind)
            nbar2mu = PeriodicField(grid, -m0 + 0j, self.mu0.kind)
        else:
            grid = circle.grid(merge_breakpoints(*extra) if extra else None)
            z, n = circle.points(grid)
            mu = PeriodicField(grid, np.asarray(self.mu_fn(z), dtype=complex), SMOOTH)
            nu = PeriodicField(grid, np.asarray(self.nu_fn(z), dtype=complex), SMOOTH)
            nbar2mu = PeriodicField(grid, np.conj(n) ** 2 * mu.values, SMOOTH)
        normal = PeriodicField(grid, np.exp(1j * grid.nodes), SMOOTH)
        return PairOnCircle(circle, grid, mu, nu, normal, nbar2mu, self.real_nu)


@dataclass(frozen=True, eq=False)
class PairOnCircle:
    """Per-node samples of a pair along a circle, plus the outward normal."""

    circle: CircleSpec
    grid: AngularGrid
    mu: PeriodicField
    nu: PeriodicField
    normal: PeriodicField
    nbar2mu: PeriodicField  # conj(n)^2 mu, piecewise-exact for angular pairs
    real_nu: bool


@dataclass(frozen=True, eq=False)
class CoefficientMatrixField:
    """2x2 elliptic coefficient field, entrywise evaluators.

    symmetric distinguishes the real-nu reduction; eig_bounds records sampled
    extremes of the symmetric part's eigenvalues.  k1/k2 are set when the
    field has the rotational form R(theta) diag(k1, k2) R(theta)^T.
    """

    a11_fn: Callable
    a12_fn: Callable
    a21_fn: Callable
    a22_fn: Callable
    symmetric: bool
    eig_bounds: tuple[float, float]
    k1: PeriodicField | None = None
    k2: PeriodicField | None = None
    constant_entries: tuple | None = None

    def __post_init__(self):
        lo, hi = self.eig_bounds
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo <= 0.0:
            raise EllipticityError(f"matrix field not positive: eig bounds {self.eig_bounds}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, a11, a12, a21, a22) -> "CoefficientMatrixField":
        vals = tuple(float(v) for v in (a11, a12, a21, a22))

        def make(v):
            return lambda z: np.full(np.shape(z), v)

        lo, hi = _sym_eigs(*[np.asarray(v) for v in vals])
        return cls(
            *(make(v) for v in vals),
            symmetric=(vals[1] == vals[2]),
            eig_bounds=(float(lo), float(hi)),
            constant_entries=vals,
        )

    @classmethod
    def identity(cls) -> "CoefficientMatrixField":
        return cls.constant(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_angular_k(cls, k: KProfile) -> "CoefficientMatrixField":
        """R(theta) diag(k1, k2) R(theta)^T as a planar field."""

        def entry(which):
            def fn(z):
                theta = wrap_angle(np.angle(np.asarray(z, dtype=complex)))
                k1 = k.k1.eval_at(theta)
                k2 = k.k2.eval_at(theta)
                c, s = np.cos(theta), np.sin(theta)
                if which == "11":
                    return k1 * c * c + k2 * s * s
                if which == "22":
                    return k1 * s * s + k2 * c * c
                return (k1 - k2) * c * s

            return fn

        lo, hi = k.bounds()
        off = entry("12")
        return cls(
            entry("11"),
            off,
            off,
            entry("22"),
            symmetric=True,
            eig_bounds=(lo, hi),
            k1=k.k1,
            k2=k.k2,
        )

    @classmethod
    def from_callables(cls, a11_fn, a12_fn, a21_fn, a22_fn, domain_radius: float = 1.0) -> "CoefficientMatrixField":
        zs = _sample_lattice(domain_radius)
        e = [np.asarray(f(zs), dtype=float) for f in (a11_fn, a12_fn, a21_fn, a22_fn)]
        lo, hi = _sym_eigs(*e)
        symmetric = bool(np.max(np.abs(e[1] - e[2])) < 1e-13)
        return cls(a11_fn, a12_fn, a21_fn, a22_fn, symmetric=symmetric, eig_bounds=(float(lo), float(hi)))

    # -- evaluation ---------------------------------------------------------

    def entries(self, z):
        z = np.asarray(z, dtype=complex)
        return (
            np.asarray(self.a11_fn(z), dtype=float),
            np.asarray(self.a12_fn(z), dtype=float),
            np.asarray(self.a21_fn(z), dtype=float),
            np.asarray(self.a22_fn(z), dtype=float),
        )

    def det(self, z):
        a11, a12, a21, a22 = self.entries(z)
        return a11 * a22 - a12 * a21

    def on_circle(self, circle: CircleSpec, extra_breakpoints=None) -> "MatrixOnCircle":
        """Samples along a circle with the normal-direction form and determinant."""
        extra = () if extra_breakpoints is None else (extra_breakpoints,)
        rotational = self.k1 is not None
        if rotational and circle.through_origin():
            raise ValueError("angular matrix field: circle must not pass through the origin")
        if rotational and circle.origin_centered:
            bks = merge_breakpoints(self.k1.grid.breakpoints, self.k2.grid.breakpoints, *extra)
            grid = circle.grid(bks)
            t = grid.nodes
            k1 = self.k1.eval_at(t)
            k2 = self.k2.eval_at(t)
            kind = self.k1.kind if self.k1.kind == self.k2.kind else SMOOTH
            c, s = np.cos(t), np.sin(t)
            a11 = PeriodicField(grid, k1 * c * c + k2 * s * s, SMOOTH)
            a22 = PeriodicField(grid, k1 * s * s + k2 * c * c, SMOOTH)
            a12 = PeriodicField(grid, (k1 - k2) * c * s, SMOOTH)
            nAn = PeriodicField(grid, k1, kind)
            det = PeriodicField(grid, k1 * k2, kind)
            return MatrixOnCircle(circle, grid, a11, a12, a12, a22,
                                  PeriodicField(grid, np.exp(1j * t), SMOOTH), nAn, det,
                                  self.symmetric)
        grid = circle.grid(merge_breakpoints(*extra) if extra else None)
        z, n = circle.points(grid)
        a11, a12, a21, a22 = self.entries(z)
        c, s = n.real, n.imag
        nAn = a11 * c * c + (a12 + a21) * c * s + a22 * s * s
        det = a11 * a22 - a12 * a21
        return MatrixOnCircle(
            circle,
            grid,
            PeriodicField(grid, a11, SMOOTH),
            PeriodicField(grid, a12, SMOOTH),
            PeriodicField(grid, a21, SMOOTH),
            PeriodicField(grid, a22, SMOOTH),
            PeriodicField(grid, n, SMOOTH),
            PeriodicField(grid, nAn, SMOOTH),
            PeriodicField(grid, det, SMOOTH),
            self.symmetric,
        )


@dataclass(frozen=True, eq=False)
class MatrixOnCircle:
    circle: CircleSpec
    grid: AngularGrid
    a11: PeriodicField
    a12: PeriodicField
    a21: PeriodicField
    a22: PeriodicField
    normal: PeriodicField
    nAn: PeriodicField  # <n, A n>
    det: PeriodicField
    symmetric: bool


def _sym_eigs(a11, a12, a21, a22):
    """Eigenvalue range of the symmetric part over samples."""
    mean = 0.5 * (a11 + a22)
    rad = np.sqrt(0.25 * (a11 - a22) ** 2 + 0.25 * (a12 + a21) ** 2)
    return float(np.min(mean - rad)), float(np.max(mean + rad))


@dataclass(frozen=True, eq=False)
class MatrixReduction:
    """Divergence-form matrices for Re(f) and Im(f) of a solution."""

    B: CoefficientMatrixField
    B_tilde: CoefficientMatrixField


def _pair_matrix_entries(mu, nu, tilde: bool):
    """Entry samples of B (tilde=False) or B-tilde (tilde=True)."""
    den = np.abs(1.0 + (nu if not tilde else -nu)) ** 2 - np.abs(mu) ** 2
    m11 = np.abs(1.0 - mu) ** 2 - np.abs(nu) ** 2
    m22 = np.abs(1.0 + mu) ** 2 - np.abs(nu) ** 2
    upper = -2.0 * np.imag(mu - nu) if not tilde else -2.0 * np.imag(mu + nu)
    lower = -2.0 * np.imag(mu + nu) if not tilde else -2.0 * np.imag(mu - nu)
    return m11 / den, upper / den, lower / den, m22 / den


def beltrami_to_matrices(pair: BeltramiPair) -> MatrixReduction:
    """Divergence-form reduction: Re(f) solves div(B grad u) = 0, Im(f) the
    B-tilde equation.  For real nu both are symmetric and B_tilde = B/det B.
    """

    def build(tilde: bool) -> CoefficientMatrixField:
        if pair.constants is not None:
            mu, nu = pair.constants
            e = _pair_matrix_entries(np.asarray(mu), np.asarray(nu), tilde)
            return CoefficientMatrixField.constant(*e)
        if pair.is_angular:
            k = k_from_munu(pair.mu0, pair.nu0)
            if tilde:
                k = KProfile(
                    PeriodicField(k.k2.grid, 1.0 / k.k2.values, k.k2.kind),
                    PeriodicField(k.k1.grid, 1.0 / k.k1.values, k.k1.kind),
                )
            return CoefficientMatrixField.from_angular_k(k)

        def entry(i):
            def fn(z):
                mu = np.asarray(pair.mu_fn(z), dtype=complex)
                nu = np.asarray(pair.nu_fn(z), dtype=complex)
                return _pair_matrix_entries(mu, nu, tilde)[i]

            return fn

        return CoefficientMatrixField.from_callables(*(entry(i) for i in range(4)))

    return MatrixReduction(build(False), build(True))


def matrix_to_beltrami(m: CoefficientMatrixField) -> BeltramiPair:
    """Recover (mu, nu) from a matrix field.

    mu = -(b11 - b22 + i(b12 + b21)) / (1 + tr + det),
    nu = (1 - det + i(b12 - b21)) / (1 + tr + det).
    """
    if m.constant_entries is not None:
        b11, b12, b21, b22 = (np.asarray(v) for v in m.constant_entries)
        tr, det = b11 + b22, b11 * b22 - b12 * b21
        den = 1.0 + tr + det
        mu = -(b11 - b22 + 1j * (b12 + b21)) / den
        nu = (1.0 - det + 1j * (b12 - b21)) / den
        return BeltramiPair.from_constant(complex(mu), complex(nu))
    if m.k1 is not None:
        mu0, nu0 = munu_from_k(KProfile(m.k1, m.k2))
        return BeltramiPair.from_angular(mu0, nu0)

    def mu_fn(z):
        b11, b12, b21, b22 = m.entries(z)
        den = 1.0 + b11 + b22 + b11 * b22 - b12 * b21
        return -(b11 - b22 + 1j * (b12 + b21)) / den

    def nu_fn(z):
        b11, b12, b21, b22 = m.entries(z)
        den = 1.0 + b11 + b22 + b11 * b22 - b12 * b21
        return (1.0 - (b11 * b22 - b12 * b21) + 1j * (b12 - b21)) / den

    return BeltramiPair.from_callables(mu_fn, nu_fn, real_nu=m.symmetric)


def normalize_matrix(m: CoefficientMatrixField) -> CoefficientMatrixField:
    """A / det A.  The circle functional gives the same value for both fields
    (swap the weight pair (phi, psi) for (1/psi, 1/phi)), so either one can
    feed the exponent estimate.
    """
    if m.constant_entries is not None:
        a11, a12, a21, a22 = m.constant_entries
        det = a11 * a22 - a12 * a21
        if det <= 0:
            raise EllipticityError(f"determinant {det} not positive")
        return CoefficientMatrixField.constant(a11 / det, a12 / det, a21 / det, a22 / det)
    if m.k1 is not None:
        grid = m.k1.grid
        return CoefficientMatrixField.from_angular_k(
            KProfile(
                PeriodicField(grid, 1.0 / m.k2.values, m.k2.kind),
                PeriodicField(grid, 1.0 / m.k1.values, m.k1.kind),
            )
        )

    def entry(which):
        def fn(z):
            a11, a12, a21, a22 = m.entries(z)
            det = a11 * a22 - a12 * a21
            return {"11": a11, "12": a12, "21": a21, "22": a22}[which] / det

        return fn

    return CoefficientMatrixField.from_callables(entry("11"), entry("12"), entry("21"), entry("22"))


def angular_to_matrix(mu0: PeriodicField, nu0: PeriodicField) -> CoefficientMatrixField:
    """Matrix field of an angular pair through the weight profiles."""
    return CoefficientMatrixField.from_angular_k(k_from_munu(mu0, nu0))
