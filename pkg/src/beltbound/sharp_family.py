"""Two-parameter family of piecewise-trigonometric angular stretchings on
which the exponent bounds are attained.

For M > 1 and tau in [0, 1] the circle splits into four arcs with junctions
{0, c pi/2, pi, pi + c pi/2}.  The weight pair (k1, k2) is (1, 1) on the
first and third arcs and (M, M^{1-2tau}) on the others.  The constants

    c = 2/(1 + M^{-tau}),    d = (4/pi) arctan M^{-(1-tau)/2}

are chosen so that a pure rotation profile on the unit arcs glues
continuously to a faster, amplitude-scaled rotation on the weighted arcs
(the junction condition is tan(d pi/4) = M^{-(1-tau)/2}), producing a
2pi-periodic profile pair with exponent d/c.  Profiles, derivatives, and
coefficients all come from closed forms, so junction and residual tests see
no interpolation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .periodic_fields import PIECEWISE, SMOOTH, AngularGrid, PeriodicField, wrap_angle
from .reduction import BeltramiPair, CoefficientMatrixField
from .stretching import AngularStretching, KProfile

__all__ = [
    "SharpFamily",
    "ScalarAngularMap",
    "cd_params",
    "build_family",
    "build_matrix",
    "build_maps",
]


def cd_params(M: float, tau: float) -> tuple[float, float]:
    """Arc-length and exponent constants of the family.

    c fixes the junction angles, d the rotation rate; d/c is the Holder
    exponent the family attains.
    """
    if not M > 1:
        raise ValueError(f"M must exceed 1, got {M}")
    if not 0 <= tau <= 1:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    c = 2.0 / (1.0 + M**-tau)
    d = (4.0 / math.pi) * math.atan(M ** (-(1.0 - tau) / 2.0))
    return c, d


@dataclass(frozen=True, eq=False)
class SharpFamily:
    """Everything derived from (M, tau): arcs, profiles, weights, coefficients."""

    M: float
    tau: float
    c: float
    d: float
    breakpoints: tuple[float, float, float, float]
    theta1: PeriodicField
    theta2: PeriodicField
    dtheta1: np.ndarray
    dtheta2: np.ndarray
    k: KProfile
    mu0: PeriodicField
    nu0: PeriodicField

    @property
    def alpha(self) -> float:
        return self.d / self.c

    @property
    def grid(self) -> AngularGrid:
        return self.theta1.grid

    def pair(self) -> BeltramiPair:
        return BeltramiPair.from_angular(self.mu0, self.nu0)

    def profiles_at(self, theta):
        """Exact (theta1, theta2, theta1', theta2') at arbitrary angles."""
        return _profile_samples(self.M, self.tau, self.c, self.d, theta)

    def map_at(self, z):
        """Exact planar map |z|^alpha (theta1 + i theta2)(arg z), 0 at 0."""
        z = np.asarray(z, dtype=complex)
        th1, th2, _, _ = self.profiles_at(np.angle(z))
        out = np.abs(z) ** self.alpha * (th1 + 1j * th2)
        return np.where(z == 0, 0.0, out)


def _profile_samples(M: float, tau: float, c: float, d: float, theta):
    """Closed-form (theta1, theta2, theta1', theta2') at the given angles.

    The second and fourth arcs repeat the first and second with a half-turn
    shift and a sign flip.
    """
    t = wrap_angle(np.asarray(theta, dtype=float))
    half = t >= math.pi
    base = np.where(half, t - math.pi, t)
    sign = np.where(half, -1.0, 1.0)
    amp = M ** ((1.0 - tau) / 2.0)  # amplitude split between the components
    rate1 = d / c
    rate2 = d * M**tau / c
    cut = c * math.pi / 2.0

    # classify against the same rounded junction values the grid carries, so
    # breakpoint nodes land on their own arc (right-limit convention)
    on1 = t < np.where(half, math.pi + cut, cut)
    arg1 = rate1 * base - d * math.pi / 4.0
    arg2 = rate2 * (base - cut) - d * math.pi / 4.0

    th1 = np.where(on1, np.sin(arg1), np.cos(arg2) / amp)
    th2 = np.where(on1, -np.cos(arg1), amp * np.sin(arg2))
    dth1 = np.where(on1, rate1 * np.cos(arg1), -rate2 * np.sin(arg2) / amp)
    dth2 = np.where(on1, rate1 * np.sin(arg1), rate2 * amp * np.cos(arg2))
    return sign * th1, sign * th2, sign * dth1, sign * dth2


def build_family(M: float, tau: float, node_count: int = 2048) -> SharpFamily:
    """Assemble the family at (M, tau) on a breakpoint-aligned grid."""
    c, d = cd_params(M, tau)
    cut = c * math.pi / 2.0
    bks = (0.0, cut, math.pi, math.pi + cut)
    grid = AngularGrid.with_breakpoints(node_count, bks)

    th1, th2, dth1, dth2 = _profile_samples(M, tau, c, d, grid.nodes)
    m_lo = M ** (1.0 - 2.0 * tau)
    den = 1.0 + M + m_lo + M ** (2.0 * (1.0 - tau))
    mu_hi = (M - m_lo) / den
    nu_hi = (M ** (2.0 * (1.0 - tau)) - 1.0) / den

    k = KProfile(
        PeriodicField.piecewise(grid, [1.0, M, 1.0, M]),
        PeriodicField.piecewise(grid, [1.0, m_lo, 1.0, m_lo]),
    )
    return SharpFamily(
        M=M,
        tau=tau,
        c=c,
        d=d,
        breakpoints=bks,
        theta1=PeriodicField(grid, th1, SMOOTH),
        theta2=PeriodicField(grid, th2, SMOOTH),
        dtheta1=dth1,
        dtheta2=dth2,
        k=k,
        mu0=PeriodicField.piecewise(grid, [0.0, mu_hi, 0.0, mu_hi]),
        nu0=PeriodicField.piecewise(grid, [0.0, nu_hi, 0.0, nu_hi]),
    )


def build_matrix(family: SharpFamily) -> CoefficientMatrixField:
    """Rotational matrix field of the family's weights; det = k1 k2 per arc."""
    return CoefficientMatrixField.from_angular_k(family.k)


@dataclass(frozen=True, eq=False)
class ScalarAngularMap:
    """Real-valued map r^alpha * profile(arg z), vanishing at the origin."""

    alpha: float
    profile: PeriodicField

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        out = np.zeros(z.shape, dtype=float)
        nz = r > 0
        vals = self.profile.eval_at(wrap_angle(np.angle(z[nz])))
        out[nz] = r[nz] ** self.alpha * np.real(vals)
        return out if out.shape else float(out)


def build_maps(family: SharpFamily) -> tuple[AngularStretching, ScalarAngularMap]:
    """The extremal mapping and the scalar solution (its real part)."""
    f = AngularStretching(
        family.alpha, family.theta1, family.theta2, family.dtheta1, family.dtheta2
    )
    u = ScalarAngularMap(family.alpha, family.theta1)
    return f, u
