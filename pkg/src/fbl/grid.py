"""Uniform cell-centered grids, regions, masks, and the boundary-collision
volume.

The grid is the discrete measure everything else integrates against: nodes at
cell centers x_i = -L + (i + 1/2) h with quadrature weight h^n, so that the
weights sum exactly to the box volume (2L)^n.  Regions test membership at
cell centers only; cells straddling the region boundary are not subdivided
(the O(h) membership error is dominated by the spectral discretization error
at the mandated resolutions).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import EmptyMaskWarning, FblError


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on the box (-L, L)^dim."""

    dim: int
    half_width: float
    points_per_axis: int

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def weight(self) -> float:
        """Quadrature weight per node, h^dim."""
        return self.spacing ** self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        h = self.spacing
        return -self.half_width + (np.arange(self.points_per_axis) + 0.5) * h

    @property
    def num_nodes(self) -> int:
        return self.points_per_axis ** self.dim

    @cached_property
    def nodes(self) -> np.ndarray:
        """All node positions, shape (num_nodes, dim).

        2D nodes are ordered with index n = ix * M + iy, matching the
        row-major flattening used by the separable spectral path.
        """
        if self.dim == 1:
            return self.axis[:, None]
        X, Y = np.meshgrid(self.axis, self.axis, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def fingerprint(self) -> tuple:
        return (self.dim, float(self.half_width), int(self.points_per_axis))


def build_grid(dim: int, half_width: float, points_per_axis: int) -> Grid:
    """Construct a cell-centered grid; rejects unsupported shapes."""
    if dim not in (1, 2):
        raise FblError(f"grid dimension must be 1 or 2, got {dim}")
    if not half_width > 0:
        raise FblError(f"half_width must be positive, got {half_width}")
    if points_per_axis < 2:
        raise FblError(f"points_per_axis must be >= 2, got {points_per_axis}")
    return Grid(int(dim), float(half_width), int(points_per_axis))


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------

class Region:
    """A bounded open region with an analytic boundary description.

    Subclasses provide: membership at points, the exact (n-1)-Hausdorff
    boundary measure, a boundary quadrature rule built from the analytic
    parametrization, and a defining function w with {w < 0} = region.
    The boundary measure is always analytic per kind, never estimated from
    a mask, so closed-form predictions stay mesh-independent.
    """

    kind: str
    dim: int

    def contains(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def boundary_measure(self) -> float:
        raise NotImplementedError

    def boundary_quadrature(self, panels: int = 256) -> tuple[np.ndarray, np.ndarray]:
        """Points on the boundary and weights integrating the surface measure."""
        raise NotImplementedError

    def defining_function(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def interior_point(self) -> np.ndarray:
        raise NotImplementedError

    def fingerprint(self) -> tuple:
        raise NotImplementedError


def _as_points(pts: np.ndarray, dim: int) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None] if dim == 1 else pts[None, :]
    return pts


def _gauss_unit(panels: int, order: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, 1]."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return t, w


@dataclass(frozen=True)
class Interval(Region):
    a: float
    b: float
    kind = "interval"
    dim = 1

    def __post_init__(self):
        if not self.b > self.a:
            raise FblError(f"empty interval ({self.a}, {self.b})")

    def contains(self, pts):
        pts = _as_points(pts, 1)
        return (pts[:, 0] > self.a) & (pts[:, 0] < self.b)

    def boundary_measure(self):
        # 0-Hausdorff measure: two endpoints
        return 2.0

    def boundary_quadrature(self, panels: int = 256):
        pts = np.array([[self.a], [self.b]])
        return pts, np.ones(2)

    def defining_function(self, pts):
        pts = _as_points(pts, 1)
        c = 0.5 * (self.a + self.b)
        r = 0.5 * (self.b - self.a)
        return (pts[:, 0] - c) ** 2 - r**2

    def interior_point(self):
        return np.array([0.5 * (self.a + self.b)])

    def fingerprint(self):
        return ("interval", float(self.a), float(self.b))


@dataclass(frozen=True)
class Rectangle(Region):
    """Axis-aligned open rectangle (x0, x1) x (y0, y1)."""

    x0: float
    x1: float
    y0: float
    y1: float
    kind = "rectangle"
    dim = 2

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise FblError("empty rectangle")

    def contains(self, pts):
        pts = _as_points(pts, 2)
        return ((pts[:, 0] > self.x0) & (pts[:, 0] < self.x1)
                & (pts[:, 1] > self.y0) & (pts[:, 1] < self.y1))

    def boundary_measure(self):
        return 2.0 * ((self.x1 - self.x0) + (self.y1 - self.y0))

    def boundary_quadrature(self, panels: int = 256):
        # split the panel budget across the four edges
        per = max(panels // 4, 1)
        t, w = _gauss_unit(per)
        pts, wts = [], []
        for (px, py, qx, qy) in [
            (self.x0, self.y0, self.x1, self.y0),
            (self.x1, self.y0, self.x1, self.y1),
            (self.x1, self.y1, self.x0, self.y1),
            (self.x0, self.y1, self.x0, self.y0),
        ]:
            speed = math.hypot(qx - px, qy - py)
            pts.append(np.column_stack([px + t * (qx - px), py + t * (qy - py)]))
            wts.append(w * speed)
        return np.vstack(pts), np.concatenate(wts)

    def defining_function(self, pts):
        # Signed max-coordinate distance; smooth off the corner diagonals,
        # which is all the sampled tube check visits.
        pts = _as_points(pts, 2)
        cx, cy = 0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1)
        ax, ay = 0.5 * (self.x1 - self.x0), 0.5 * (self.y1 - self.y0)
        return np.maximum(np.abs(pts[:, 0] - cx) - ax, np.abs(pts[:, 1] - cy) - ay)

    def interior_point(self):
        return np.array([0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1)])

    def fingerprint(self):
        return ("rectangle", float(self.x0), float(self.x1), float(self.y0), float(self.y1))


@dataclass(frozen=True)
class Disk(Region):
    cx: float
    cy: float
    radius: float
    kind = "disk"
    dim = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise FblError(f"disk radius must be positive, got {self.radius}")

    def _r2(self, pts):
        pts = _as_points(pts, 2)
        return (pts[:, 0] - self.cx) ** 2 + (pts[:, 1] - self.cy) ** 2

    def contains(self, pts):
        return self._r2(pts) < self.radius**2

    def boundary_measure(self):
        return 2.0 * math.pi * self.radius

    def boundary_quadrature(self, panels: int = 256):
        t, w = _gauss_unit(panels)
        th = 2.0 * math.pi * t
        pts = np.column_stack([self.cx + self.radius * np.cos(th),
                               self.cy + self.radius * np.sin(th)])
        return pts, w * (2.0 * math.pi * self.radius)

    def defining_function(self, pts):
        return self._r2(pts) - self.radius**2

    def interior_point(self):
        return np.array([self.cx, self.cy])

    def fingerprint(self):
        return ("disk", float(self.cx), float(self.cy), float(self.radius))


@dataclass(frozen=True)
class Annulus(Region):
    cx: float
    cy: float
    r_inner: float
    r_outer: float
    kind = "annulus"
    dim = 2

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise FblError("annulus needs 0 < r_inner < r_outer")

    def _r2(self, pts):
        pts = _as_points(pts, 2)
        return (pts[:, 0] - self.cx) ** 2 + (pts[:, 1] - self.cy) ** 2

    def contains(self, pts):
        r2 = self._r2(pts)
        return (r2 > self.r_inner**2) & (r2 < self.r_outer**2)

    def boundary_measure(self):
        return 2.0 * math.pi * (self.r_inner + self.r_outer)

    def boundary_quadrature(self, panels: int = 256):
        per = max(panels // 2, 1)
        t, w = _gauss_unit(per)
        th = 2.0 * math.pi * t
        pts, wts = [], []
        for r in (self.r_inner, self.r_outer):
            pts.append(np.column_stack([self.cx + r * np.cos(th),
                                        self.cy + r * np.sin(th)]))
            wts.append(w * (2.0 * math.pi * r))
        return np.vstack(pts), np.concatenate(wts)

    def defining_function(self, pts):
        r2 = self._r2(pts)
        scale = self.r_outer**2 - self.r_inner**2
        return (r2 - self.r_inner**2) * (r2 - self.r_outer**2) / scale

    def interior_point(self):
        return np.array([self.cx + 0.5 * (self.r_inner + self.r_outer), self.cy])

    def fingerprint(self):
        return ("annulus", float(self.cx), float(self.cy),
                float(self.r_inner), float(self.r_outer))


@dataclass(frozen=True)
class UnionOfTwo(Region):
    """Disjoint union of two regions of equal dimension."""

    first: Region
    second: Region
    kind = "union-of-two"

    def __post_init__(self):
        if self.first.dim != self.second.dim:
            raise FblError("union components must share the dimension")
        object.__setattr__(self, "dim", self.first.dim)

    def contains(self, pts):
        return self.first.contains(pts) | self.second.contains(pts)

    def boundary_measure(self):
        return self.first.boundary_measure() + self.second.boundary_measure()

    def boundary_quadrature(self, panels: int = 256):
        p1, w1 = self.first.boundary_quadrature(max(panels // 2, 1))
        p2, w2 = self.second.boundary_quadrature(max(panels // 2, 1))
        return np.vstack([p1, p2]), np.concatenate([w1, w2])

    def defining_function(self, pts):
        return self.first.defining_function(pts) * self.second.defining_function(pts)

    def interior_point(self):
        return self.first.interior_point()

    def fingerprint(self):
        return ("union-of-two", self.first.fingerprint(), self.second.fingerprint())


def region_from_config(cfg: dict) -> Region:
    """Build a region from its config table, e.g.
    ``{ kind = "disk", center = [0.0, 0.0], radius = 0.6 }``."""
    kind = cfg.get("kind")
    if kind == "interval":
        return Interval(float(cfg["a"]), float(cfg["b"]))
    if kind == "rectangle":
        x, y = cfg["x"], cfg["y"]
        return Rectangle(float(x[0]), float(x[1]), float(y[0]), float(y[1]))
    if kind == "disk":
        c = cfg.get("center", (0.0, 0.0))
        return Disk(float(c[0]), float(c[1]), float(cfg["radius"]))
    if kind == "annulus":
        c = cfg.get("center", (0.0, 0.0))
        return Annulus(float(c[0]), float(c[1]),
                       float(cfg["r_inner"]), float(cfg["r_outer"]))
    if kind in ("union", "union-of-two"):
        return UnionOfTwo(region_from_config(cfg["first"]),
                          region_from_config(cfg["second"]))
    raise FblError(f"unknown region kind {kind!r}")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def region_mask(grid: Grid, region: Region) -> np.ndarray:
    """Indices of grid nodes whose cell centers lie in the region.

    Deterministic; an empty selection is legal and raises EmptyMaskWarning.
    """
    if region.dim != grid.dim:
        raise FblError(
            f"region dimension {region.dim} incompatible with grid dimension {grid.dim}")
    sel = region.contains(grid.nodes)
    idx = np.flatnonzero(sel)
    if idx.size == 0:
        warnings.warn(f"region {region.kind} selected no grid nodes",
                      EmptyMaskWarning, stacklevel=2)
    return idx


@dataclass(frozen=True)
class CollisionEstimate:
    value: float
    standard_error: float | None  # None on the exact 1D path


def boundary_collision_volume(grid: Grid, region: Region, radius: float,
                              sampler_budget: int = 100_000,
                              seed: int = 0) -> CollisionEstimate:
    """Volume of near-boundary collisions,
    integral of 1_R(x) 1_{R^c}(y) 1{|x-y| <= radius} over the box.

    In 1D this is the exact double sum over grid cells; in 2D a seeded
    Monte Carlo estimate over `sampler_budget` pairs (x, x+z) with z uniform
    in the radius-ball, which keeps every sample inside the thin collision
    shell instead of wasting the budget on distant pairs.
    """
    if not radius > 0:
        raise FblError(f"radius must be positive, got {radius}")
    mask = region.contains(grid.nodes)
    if grid.dim == 1:
        x_in = np.sort(grid.axis[mask])
        x_out = np.sort(grid.axis[~mask])
        lo = np.searchsorted(x_out, x_in - radius, side="left")
        hi = np.searchsorted(x_out, x_in + radius, side="right")
        count = int((hi - lo).sum())
        return CollisionEstimate(count * grid.weight**2, None)

    if sampler_budget < 10_000:
        raise FblError(
            f"2D collision volume needs sampler_budget >= 10000, got {sampler_budget}")
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [seed & 0xFFFFFFFFFFFFFFFF, 0x636F6C6C], dtype=np.uint64)))
    L = grid.half_width
    x = rng.uniform(-L, L, size=(sampler_budget, 2))
    # z uniform in the disk of the given radius
    u = np.sqrt(rng.uniform(0.0, 1.0, sampler_budget)) * radius
    th = rng.uniform(0.0, 2.0 * math.pi, sampler_budget)
    y = x + np.column_stack([u * np.cos(th), u * np.sin(th)])
    in_box = np.all(np.abs(y) < L, axis=1)
    hit = region.contains(x) & ~region.contains(y) & in_box
    p = hit.mean()
    vol = (2.0 * L) ** 2 * math.pi * radius**2
    value = vol * p
    se = vol * math.sqrt(max(p * (1.0 - p), 0.0) / sampler_budget)
    return CollisionEstimate(value, se)
