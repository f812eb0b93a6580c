"""Symmetric eigendecomposition and the semiclassical counting laws.

Three solve paths: tridiagonal (1D), tensor products of two 1D solves
(separable 2D), and a dense symmetric decomposition capped at 4096 unknowns.
Only pairs below an upper cutoff (default mu + 0.25) are retained; everything
downstream needs occupied states plus a window margin, so memory stays
O(M * N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CutoffTooLow, MatrixTooLarge, NoConvergence
from .schrodinger import Potential, SchrodingerProblem
from .predictions import ball_volume

DENSE_CAP = 4096
DEFAULT_WINDOW = 0.25


@dataclass(frozen=True)
class SpectralData:
    """Retained eigenpairs of a discretized operator, ascending."""

    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)   # Euclidean-orthonormal columns
    upper_cutoff: float
    hbar: float
    mu: float
    grid_fingerprint: tuple
    grid_weight: float
    separable: bool = False
    # for separable problems: (axis eigenvalues x, axis eigenvalues y,
    # index pairs (i, j) per retained column); lets fast paths rebuild
    # tensor structure without refactoring the big matrix
    factor_data: tuple | None = None

    @property
    def count(self) -> int:
        return len(self.eigenvalues)


def _solve_tridiagonal(diag, off, lo, hi):
    try:
        w, v = eigh_tridiagonal(diag, off, select="v", select_range=(lo, hi))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return w, v


def eigendecompose(problem: SchrodingerProblem,
                   upper_cutoff: float | None = None) -> SpectralData:
    """Retain all eigenpairs with eigenvalue <= upper_cutoff.

    The cutoff defaults to mu + 0.25 and must not sit below mu.
    """
    mu = problem.mu
    if upper_cutoff is None:
        upper_cutoff = mu + DEFAULT_WINDOW
    if upper_cutoff < mu:
        raise CutoffTooLow(
            f"upper_cutoff {upper_cutoff} must be >= mu = {mu}")

    grid = problem.grid
    lo = float(problem.node_values.min()) - 1.0

    if grid.dim == 1:
        diag, off = problem.tridiagonal()
        w, v = _solve_tridiagonal(diag, off, lo, float(upper_cutoff))
        return SpectralData(eigenvalues=w, eigenvectors=v,
                            upper_cutoff=float(upper_cutoff),
                            hbar=problem.hbar, mu=mu,
                            grid_fingerprint=grid.fingerprint(),
                            grid_weight=grid.weight)

    if problem.separable:
        (dx, ox), (dy, oy) = problem.axis_tridiagonals()
        # each factor needs levels up to cutoff minus the other's ground state
        wx0 = eigh_tridiagonal(dx, ox, select="i", select_range=(0, 0),
                               eigvals_only=True)[0]
        wy0 = eigh_tridiagonal(dy, oy, select="i", select_range=(0, 0),
                               eigvals_only=True)[0]
        wx, vx = _solve_tridiagonal(dx, ox, lo, float(upper_cutoff) - wy0)
        wy, vy = _solve_tridiagonal(dy, oy, lo, float(upper_cutoff) - wx0)
        sums = wx[:, None] + wy[None, :]
        ii, jj = np.nonzero(sums <= upper_cutoff)
        order = np.argsort(sums[ii, jj], kind="stable")
        ii, jj = ii[order], jj[order]
        w = sums[ii, jj]
        M = grid.points_per_axis
        v = np.empty((M * M, len(w)))
        for t, (i, j) in enumerate(zip(ii, jj)):
            v[:, t] = np.multiply.outer(vx[:, i], vy[:, j]).ravel()
        return SpectralData(eigenvalues=w, eigenvectors=v,
                            upper_cutoff=float(upper_cutoff),
                            hbar=problem.hbar, mu=mu,
                            grid_fingerprint=grid.fingerprint(),
                            grid_weight=grid.weight,
                            separable=True,
                            factor_data=(wx, wy, np.column_stack([ii, jj])))

    n = grid.num_nodes
    if n > DENSE_CAP:
        raise MatrixTooLarge(
            f"dense non-separable eigenproblem of size {n} exceeds the cap "
            f"{DENSE_CAP}")
    H = problem.dense_matrix()
    try:
        w, v = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    keep = w <= upper_cutoff
    return SpectralData(eigenvalues=w[keep], eigenvectors=v[:, keep],
                        upper_cutoff=float(upper_cutoff),
                        hbar=problem.hbar, mu=mu,
                        grid_fingerprint=grid.fingerprint(),
                        grid_weight=grid.weight)


def fermi_count(spectral: SpectralData, mu: float) -> int:
    """N = #{k : lambda_k <= mu}; ties at mu count as occupied."""
    if mu > spectral.upper_cutoff:
        raise CutoffTooLow(
            f"retained range tops out at {spectral.upper_cutoff}, below mu = {mu}")
    return int(np.searchsorted(spectral.eigenvalues, mu, side="right"))


def weyl_prediction(potential: Potential, mu: float, hbar: float,
                    dim: int) -> float:
    """Leading-order count c_dim * Z / (2 pi hbar)^dim with
    Z the bulk phase-space volume integral of (mu - V)_+^{dim/2}."""
    Z = potential.excess_moment(mu, dim / 2.0, dim)
    return ball_volume(dim) * Z / (2.0 * math.pi * hbar) ** dim


def window_count(spectral: SpectralData, lam: float, hbar: float) -> int:
    """#{k : |lambda_k - lam| <= hbar}, the microscopic window count."""
    if lam + hbar > spectral.upper_cutoff:
        raise CutoffTooLow(
            f"window [{lam - hbar}, {lam + hbar}] exceeds retained range "
            f"(cutoff {spectral.upper_cutoff})")
    ev = spectral.eigenvalues
    return int(np.searchsorted(ev, lam + hbar, side="right")
               - np.searchsorted(ev, lam - hbar, side="left"))
