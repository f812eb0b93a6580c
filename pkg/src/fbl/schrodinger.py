"""Discretized semiclassical Schrodinger operators -hbar^2 Lap + V.

Second-order central differences with Dirichlet walls on the grid box.
Eigenfunctions below the Fermi energy decay exponentially outside the
classically allowed region, so a padded box whose walls satisfy
V >= mu + margin is faithful; that wall rule plus the
eight-points-per-de-Broglie-wavelength resolution rule are this module's
accuracy contract and are enforced at assembly time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from .errors import BoxTooSmall, EmptyDroplet, FblError, ResolutionTooCoarse
from .grid import Grid


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------

class Potential:
    """Confining potential on the grid box."""

    kind: str
    separable = False

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """V at arbitrary points, shape (k, dim) or (k,) in 1D."""
        raise NotImplementedError

    def excess_moment(self, mu: float, s: float, dim: int) -> float:
        """Integral of (mu - V)_+^s over R^dim."""
        raise NotImplementedError

    def fingerprint(self) -> tuple:
        raise NotImplementedError


def _pts_array(pts, dim):
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None] if dim == 1 else pts[None, :]
    return pts


@dataclass(frozen=True)
class Power(Potential):
    """V(x) = |x|^q, radial in any dimension.  q = 2 is the harmonic well."""

    q: float = 2.0
    kind = "power"

    def __post_init__(self):
        if not self.q > 0:
            raise FblError(f"power exponent must be positive, got {self.q}")

    def evaluate(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            r = np.abs(pts)
        else:
            r = np.sqrt((pts * pts).sum(axis=1))
        return r**self.q

    def droplet_radius(self, mu: float) -> float:
        if mu <= 0:
            raise EmptyDroplet(f"mu = {mu} <= min V = 0")
        return mu ** (1.0 / self.q)

    def excess_moment(self, mu, s, dim):
        if mu <= 0:
            return 0.0
        q = self.q
        if dim == 1:
            return 2.0 * mu ** (s + 1.0 / q) * math.gamma(1.0 / q) \
                * math.gamma(s + 1.0) / (q * math.gamma(1.0 / q + s + 1.0))
        # radial in 2D
        return 2.0 * math.pi * mu ** (s + 2.0 / q) * math.gamma(2.0 / q) \
            * math.gamma(s + 1.0) / (q * math.gamma(2.0 / q + s + 1.0))

    def fingerprint(self):
        return ("power", float(self.q))


def harmonic() -> Power:
    return Power(2.0)


@dataclass(frozen=True)
class Tabulated(Potential):
    """Values sampled on a 1D axis; evaluation is a nearest-node lookup,
    which keeps the discrete model exactly self-consistent."""

    axis: tuple
    values: tuple
    kind = "tabulated"

    @staticmethod
    def from_arrays(axis, values):
        axis = np.asarray(axis, float)
        values = np.asarray(values, float)
        if axis.shape != values.shape or axis.ndim != 1:
            raise FblError("tabulated potential needs matching 1D axis/values")
        return Tabulated(tuple(axis.tolist()), tuple(values.tolist()))

    @cached_property
    def _axis(self):
        return np.asarray(self.axis)

    @cached_property
    def _values(self):
        return np.asarray(self.values)

    def evaluate(self, pts):
        pts = np.asarray(pts, dtype=float)
        x = pts if pts.ndim == 1 else pts[:, 0]
        h = self._axis[1] - self._axis[0]
        idx = np.clip(np.round((x - self._axis[0]) / h).astype(int),
                      0, len(self.axis) - 1)
        return self._values[idx]

    def excess_moment(self, mu, s, dim):
        if dim != 1:
            raise FblError("tabulated potentials are one-dimensional")
        h = self._axis[1] - self._axis[0]
        return float((np.maximum(mu - self._values, 0.0) ** s).sum() * h)

    def fingerprint(self):
        return ("tabulated", len(self.axis), float(self._values.min()),
                float(self._values.sum()))


@dataclass(frozen=True)
class SeparableSum(Potential):
    """V(x, y) = vx(x) + vy(y) with 1D factor potentials (2D only)."""

    vx: Potential
    vy: Potential
    kind = "separable-sum"
    separable = True

    def evaluate(self, pts):
        pts = _pts_array(pts, 2)
        return self.vx.evaluate(pts[:, 0]) + self.vy.evaluate(pts[:, 1])

    def excess_moment(self, mu, s, dim):
        if dim != 2:
            raise FblError("separable-sum potentials live in dimension 2")
        # inner integral has the 1D closed form; integrate the outer
        # variable adaptively over its droplet extent
        lo = _extent(self.vx, mu)
        if lo is None:
            return 0.0

        def inner(x):
            c = mu - float(self.vx.evaluate(np.array([x]))[0])
            return self.vy.excess_moment(c, s, 1) if c > 0 else 0.0

        val, _ = quad(inner, -lo, lo, limit=200)
        return val

    def fingerprint(self):
        return ("separable-sum", self.vx.fingerprint(), self.vy.fingerprint())


def _extent(pot: Potential, mu: float) -> float | None:
    """Half-width of {pot < mu} for a 1D factor, None if empty."""
    if isinstance(pot, Power):
        return pot.droplet_radius(mu) if mu > 0 else None
    if isinstance(pot, Tabulated):
        inside = pot._axis[pot._values < mu]
        return float(np.abs(inside).max()) if inside.size else None
    raise FblError(f"unsupported separable factor kind {pot.kind!r}")


def potential_from_config(cfg: dict) -> Potential:
    """Potential from its config table, e.g. ``{ kind = "power", q = 2.0 }``."""
    kind = cfg.get("kind")
    if kind == "harmonic":
        return harmonic()
    if kind == "power":
        return Power(float(cfg.get("q", 2.0)))
    if kind in ("separable", "separable-sum"):
        return SeparableSum(potential_from_config(cfg["vx"]),
                            potential_from_config(cfg["vy"]))
    if kind == "tabulated":
        return Tabulated.from_arrays(cfg["axis"], cfg["values"])
    raise FblError(f"unknown potential kind {kind!r}")


# ---------------------------------------------------------------------------
# Droplet
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DropletDescriptor:
    """Analytic description of the classically allowed region {V < mu}."""

    kind: str                     # "interval" | "disk" | "box-hull"
    radius: float | None = None
    interval: tuple | None = None
    box: tuple | None = None      # ((x0, x1), (y0, y1)) hull for separable


def droplet_descriptor(potential: Potential, mu: float,
                       dim: int = 1) -> DropletDescriptor:
    if isinstance(potential, Power):
        r = potential.droplet_radius(mu)
        if dim == 1:
            return DropletDescriptor("interval", interval=(-r, r))
        return DropletDescriptor("disk", radius=r)
    if isinstance(potential, Tabulated):
        ext = _extent(potential, mu)
        if ext is None:
            raise EmptyDroplet(f"mu = {mu} below tabulated minimum")
        return DropletDescriptor("interval", interval=(-ext, ext))
    if isinstance(potential, SeparableSum):
        mx = float(potential.vx.evaluate(np.array([0.0]))[0])
        my = float(potential.vy.evaluate(np.array([0.0]))[0])
        ax = _extent(potential.vx, mu - my)
        ay = _extent(potential.vy, mu - mx)
        if ax is None or ay is None:
            raise EmptyDroplet(f"mu = {mu} leaves no allowed region")
        return DropletDescriptor("box-hull", box=((-ax, ax), (-ay, ay)))
    raise FblError(f"no droplet description for potential kind {potential.kind!r}")


# ---------------------------------------------------------------------------
# The discretized operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostics:
    h: float
    hbar: float
    points_per_wavelength: float
    wall_margin: float


@dataclass(frozen=True)
class SchrodingerProblem:
    grid: Grid
    potential: Potential
    hbar: float
    mu: float
    node_values: np.ndarray = field(repr=False, compare=False)
    diagnostics: Diagnostics = None

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def separable(self) -> bool:
        return self.potential.separable and self.grid.dim == 2

    def tridiagonal(self) -> tuple[np.ndarray, np.ndarray]:
        """(diagonal, off-diagonal) of the 1D stencil matrix."""
        if self.grid.dim != 1:
            raise FblError("tridiagonal form exists only in 1D")
        h = self.grid.spacing
        t = self.hbar**2 / h**2
        diag = 2.0 * t + self.node_values
        off = np.full(self.grid.points_per_axis - 1, -t)
        return diag, off

    def axis_tridiagonals(self):
        """For separable 2D problems: the two 1D factor stencils."""
        if not self.separable:
            raise FblError("axis factors exist only for separable 2D problems")
        h = self.grid.spacing
        t = self.hbar**2 / h**2
        x = self.grid.axis
        out = []
        for pot in (self.potential.vx, self.potential.vy):
            v = pot.evaluate(x)
            out.append((2.0 * t + v, np.full(len(x) - 1, -t)))
        return out

    def dense_matrix(self) -> np.ndarray:
        n = self.grid.num_nodes
        h = self.grid.spacing
        t = self.hbar**2 / h**2
        if self.grid.dim == 1:
            diag, off = self.tridiagonal()
            H = np.diag(diag)
            H += np.diag(off, 1) + np.diag(off, -1)
            return H
        M = self.grid.points_per_axis
        H = np.zeros((n, n))
        np.fill_diagonal(H, 4.0 * t + self.node_values)
        for k in range(n):
            ix, iy = divmod(k, M)
            if ix + 1 < M:
                H[k, k + M] = H[k + M, k] = -t
            if iy + 1 < M:
                H[k, k + 1] = H[k + 1, k] = -t
        return H

    def fingerprint(self) -> tuple:
        return (self.grid.fingerprint(), self.potential.fingerprint(),
                float(self.hbar), float(self.mu))


def resolution_limit(hbar: float, mu: float, v_min: float) -> float:
    """Largest admissible spacing: 8 points per shortest de Broglie wavelength."""
    return 2.0 * math.pi * hbar / (8.0 * math.sqrt(max(mu - v_min, 0.0)) + 1e-12)


def assemble(grid: Grid, potential: Potential, hbar: float, mu: float,
             margin: float = 0.5) -> SchrodingerProblem:
    """Build the stencil operator; rejects under-resolved or under-padded boxes."""
    if not hbar > 0:
        raise FblError(f"hbar must be positive, got {hbar}")
    if potential.separable and grid.dim != 2:
        raise FblError("separable-sum potentials require a 2D grid")
    V = potential.evaluate(grid.nodes)
    v_min = float(V.min())
    if v_min >= mu:
        raise EmptyDroplet(f"min V = {v_min:.6g} >= mu = {mu:.6g} on the grid")

    h = grid.spacing
    h_max = resolution_limit(hbar, mu, v_min)
    if h > h_max:
        raise ResolutionTooCoarse(h, h_max, hbar)

    M = grid.points_per_axis
    if grid.dim == 1:
        wall = np.array([V[0], V[-1]])
    else:
        Vg = V.reshape(M, M)
        wall = np.concatenate([Vg[0], Vg[-1], Vg[:, 0], Vg[:, -1]])
    wall_min = float(wall.min())
    if wall_min < mu + margin:
        raise BoxTooSmall(wall_min, mu + margin)

    lam = 2.0 * math.pi * hbar / math.sqrt(max(mu - v_min, 1e-300))
    diag = Diagnostics(h=h, hbar=hbar, points_per_wavelength=lam / h,
                       wall_margin=wall_min - mu)
    return SchrodingerProblem(grid=grid, potential=potential, hbar=float(hbar),
                              mu=float(mu), node_values=V, diagnostics=diag)
