"""Angular grids on [0, 2pi), sampled periodic fields, and circle geometry.

Everything downstream (coefficient restriction, circle averages, weight
optimization) runs on samples over an AngularGrid.  The grid is a union of
uniform subgrids between breakpoints, so discontinuous integrands whose jumps
sit on breakpoints are integrated piecewise-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TWO_PI",
    "SMOOTH",
    "PIECEWISE",
    "wrap_angle",
    "merge_breakpoints",
    "AngularGrid",
    "PeriodicField",
    "periodic_quadrature",
    "periodic_mean",
    "field_extrema",
    "CircleSpec",
    "restrict_to_circle",
]

TWO_PI = 2.0 * np.pi

# field kinds
SMOOTH = "smooth"
PIECEWISE = "piecewise-constant"

_MERGE_TOL = 1e-12


def wrap_angle(theta):
    """Map angles into [0, 2pi)."""
    return np.mod(theta, TWO_PI)


def merge_breakpoints(*groups, tol: float = 1e-10) -> np.ndarray:
    """Sorted union of breakpoint sets, removing near-duplicates.

    0 is always a member: grids anchor their first node there, which costs
    nothing (an extra segment boundary inside a smooth piece) and keeps node
    arrays sorted without wrap-around bookkeeping.
    """
    pool = [np.zeros(1)]
    for g in groups:
        if g is None:
            continue
        pool.append(wrap_angle(np.atleast_1d(np.asarray(g, dtype=float))))
    merged = np.sort(np.concatenate(pool))
    keep = np.concatenate([[True], np.diff(merged) > tol])
    out = merged[keep]
    # a breakpoint within tol of 2pi collides with 0
    if out.size > 1 and TWO_PI - out[-1] <= tol:
        out = out[:-1]
    return out


@dataclass(frozen=True, eq=False)
class AngularGrid:
    """Nodes in [0, 2pi), uniform between consecutive breakpoints.

    Invariants: nodes sorted, every breakpoint is a node, node 0 exists.
    """

    nodes: np.ndarray
    breakpoints: np.ndarray
    segment_starts: np.ndarray  # node index of each breakpoint

    @classmethod
    def uniform(cls, node_count: int) -> "AngularGrid":
        if node_count < 4:
            raise ValueError(f"node_count must be >= 4, got {node_count}")
        nodes = TWO_PI * np.arange(node_count) / node_count
        return cls(nodes, np.zeros(1), np.zeros(1, dtype=int))

    @classmethod
    def with_breakpoints(cls, node_count: int, breakpoints) -> "AngularGrid":
        bks = merge_breakpoints(breakpoints)
        if bks.size == 1:
            return cls.uniform(node_count)
        if node_count < 4 * bks.size:
            raise ValueError(
                f"node_count {node_count} too small for {bks.size} breakpoints"
            )
        rights = np.concatenate([bks[1:], [TWO_PI]])
        lengths = rights - bks
        counts = np.maximum(1, np.rint(node_count * lengths / TWO_PI).astype(int))
        chunks = [b + ln * np.arange(m) / m for b, ln, m in zip(bks, lengths, counts)]
        nodes = np.concatenate(chunks)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        return cls(nodes, bks, starts)

    @property
    def node_count(self) -> int:
        return self.nodes.size

    def spacings(self) -> np.ndarray:
        """Node-to-node gaps, cyclically closed."""
        return np.diff(np.concatenate([self.nodes, [self.nodes[0] + TWO_PI]]))

    def segment_of(self, theta) -> np.ndarray:
        """Index of the breakpoint segment containing each angle."""
        t = wrap_angle(np.asarray(theta, dtype=float))
        return np.clip(
            np.searchsorted(self.breakpoints, t + _MERGE_TOL, side="right") - 1,
            0,
            self.breakpoints.size - 1,
        )

    def same_layout(self, other: "AngularGrid") -> bool:
        return self.nodes.size == other.nodes.size and np.array_equal(
            self.nodes, other.nodes
        )


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """Samples of a 2pi-periodic function on an AngularGrid.

    kind is SMOOTH (continuous between and across breakpoints) or PIECEWISE
    (constant between consecutive breakpoints; node values within a segment
    all agree and jumps sit exactly on breakpoints).
    """

    grid: AngularGrid
    values: np.ndarray
    kind: str = SMOOTH

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.grid.node_count,):
            raise ValueError(
                f"expected {self.grid.node_count} samples, got shape {vals.shape}"
            )
        bad = ~np.isfinite(vals)
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise ValueError(f"non-finite sample at node {idx} (theta={self.grid.nodes[idx]:.6f})")
        if self.kind not in (SMOOTH, PIECEWISE):
            raise ValueError(f"unknown field kind {self.kind!r}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, grid: AngularGrid, value) -> "PeriodicField":
        return cls(grid, np.full(grid.node_count, value), PIECEWISE)

    @classmethod
    def from_callable(cls, grid: AngularGrid, fn, kind: str = SMOOTH) -> "PeriodicField":
        return cls(grid, np.asarray(fn(grid.nodes)), kind)

    @classmethod
    def piecewise(cls, grid: AngularGrid, piece_values) -> "PeriodicField":
        """One constant per breakpoint segment, expanded to node samples."""
        piece_values = np.asarray(piece_values)
        if piece_values.shape != (grid.breakpoints.size,):
            raise ValueError(
                f"expected {grid.breakpoints.size} piece values, got {piece_values.shape}"
            )
        seg = grid.segment_of(grid.nodes)
        return cls(grid, piece_values[seg], PIECEWISE)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def piece_values(self) -> np.ndarray:
        """Per-segment constants (valid for PIECEWISE fields)."""
        return self.values[self.grid.segment_starts]

    def eval_at(self, theta) -> np.ndarray:
        """Evaluate off-node: step lookup (piecewise) or periodic linear interp."""
        t = wrap_angle(np.asarray(theta, dtype=float))
        if self.kind == PIECEWISE:
            return self.piece_values()[self.grid.segment_of(t)]
        xp = np.concatenate([self.grid.nodes, [self.grid.nodes[0] + TWO_PI]])
        fp = np.concatenate([self.values, [self.values[0]]])
        if np.iscomplexobj(fp):
            return np.interp(t, xp, fp.real) + 1j * np.interp(t, xp, fp.imag)
        return np.interp(t, xp, fp)


def periodic_quadrature(field: PeriodicField):
    """Integral over one period.

    Piecewise-constant fields: exact (left-value times gap).  Smooth fields:
    cyclic trapezoid, O(h^2) in the largest node gap, spectral for smooth
    periodic data on uniform grids.
    """
    h = field.grid.spacings()
    v = field.values
    if field.kind == PIECEWISE:
        return np.sum(h * v)
    return 0.5 * np.sum(h * (v + np.roll(v, -1)))


def periodic_mean(field: PeriodicField):
    return periodic_quadrature(field) / TWO_PI


def field_extrema(field: PeriodicField) -> tuple[float, float]:
    """(min, max) over samples; refuses complex data."""
    if not field.is_real:
        raise TypeError("extrema of a complex-valued field are undefined")
    return float(np.min(field.values)), float(np.max(field.values))


@dataclass(frozen=True)
class CircleSpec:
    """A circle |z - center| = radius with a sampling resolution."""

    center: complex
    radius: float
    resolution: int = 2048

    def __post_init__(self):
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {self.resolution}")

    @property
    def origin_centered(self) -> bool:
        return abs(self.center) < 1e-14 * max(1.0, self.radius)

    def through_origin(self, tol: float = 1e-9) -> bool:
        return abs(abs(complex(self.center)) - self.radius) <= tol * self.radius

    def grid(self, breakpoints=None) -> AngularGrid:
        if breakpoints is None:
            return AngularGrid.uniform(self.resolution)
        return AngularGrid.with_breakpoints(self.resolution, breakpoints)

    def points(self, grid: AngularGrid) -> tuple[np.ndarray, np.ndarray]:
        """(points z on the circle, outward unit normals e^{it}) at grid nodes."""
        n = np.exp(1j * grid.nodes)
        return complex(self.center) + self.radius * n, n


def restrict_to_circle(obj, circle: CircleSpec):
    """Sample a coefficient pair or matrix field along a circle.

    Dispatches to obj.on_circle; see reduction.BeltramiPair.on_circle and
    reduction.CoefficientMatrixField.on_circle for the returned samples.
    """
    on_circle = getattr(obj, "on_circle", None)
    if on_circle is None:
        raise TypeError(f"cannot restrict object of type {type(obj).__name__} to a circle")
    return on_circle(circle)
