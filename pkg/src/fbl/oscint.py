"""Oscillatory-integral numerics: the ball-indicator Fourier transform via
Bessel functions, its large-argument asymptotics, and stationary-phase
expansions for quadratic model phases with amplitudes living on a small
scale delta, validated against a brute-force panel quadrature.

Conventions.  The transform of the unit-ball indicator is

    hat 1_B(xi) = (2 pi)^{-n/2} * integral over B of e^{-i x.xi} dx
                = J_{n/2}(|xi|) / |xi|^{n/2},

with value 2^{-n/2}/Gamma(n/2+1) at xi = 0.  For the quadratic phase
Phi(x) = x.Hx/2 the normalized expansion reads

    (2 pi i hbar)^{-d/2} * integral e^{i Phi/hbar} a
        = i^{-alpha} |det H|^{-1/2} *
          sum_{k<ell} hbar^k ((i/2) div H^{-1} grad)^k a (0) / k!
        + O((hbar/delta^2)^ell),

alpha the number of negative eigenvalues of H.  The k = 1 coefficient
carries the factor 1/2 from the quadratic phase; the complex-Gaussian
closed form pins it (see the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (ArgumentTooSmall, BudgetExceeded, DegeneratePhase,
                     FblError, UnsupportedDimension)

SERIES_ASYMPTOTIC_SWITCH = 12.0


# ---------------------------------------------------------------------------
# Bessel J_nu by ascending series and large-argument asymptotics
# ---------------------------------------------------------------------------

def _bessel_series(nu: float, x: float) -> float:
    total = 0.0
    term = (0.5 * x) ** nu / math.gamma(nu + 1.0)
    m = 0
    while m < 400:
        total += term
        m += 1
        term *= -(0.25 * x * x) / (m * (nu + m))
        if abs(term) <= 1e-18 * (abs(total) + 1e-300):
            return total + term
    return total


def _bessel_asymptotic(nu: float, x: float, terms: int = 6) -> float:
    # Hankel expansion: a_0 = 1, a_{k} = a_{k-1} (4 nu^2 - (2k-1)^2)/(8k)
    mu4 = 4.0 * nu * nu
    a = [1.0]
    for k in range(1, terms + 1):
        a.append(a[-1] * (mu4 - (2 * k - 1) ** 2) / (8.0 * k))
    omega = x - nu * math.pi / 2.0 - math.pi / 4.0
    p = sum((-1) ** k * a[2 * k] / x ** (2 * k)
            for k in range((terms + 2) // 2))
    q = sum((-1) ** k * a[2 * k + 1] / x ** (2 * k + 1)
            for k in range((terms + 1) // 2))
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(omega) - q * math.sin(omega))


def bessel_j(nu: float, x: float) -> float:
    """J_nu(x) for x >= 0: ascending series up to the switch point, the
    asymptotic expansion with several correction terms beyond."""
    if x < 0:
        raise FblError("bessel_j expects x >= 0")
    if x <= SERIES_ASYMPTOTIC_SWITCH:
        return _bessel_series(nu, x)
    return _bessel_asymptotic(nu, x)


def ball_indicator_ft(n: int, xi_norm: float) -> float:
    """hat 1_B(xi) = J_{n/2}(|xi|)/|xi|^{n/2} for the unit ball in R^n."""
    if n not in (1, 2, 3):
        raise UnsupportedDimension(f"ball transform supports n in 1..3, got {n}")
    if xi_norm < 0:
        raise FblError("xi_norm must be >= 0")
    if xi_norm == 0.0:
        return 2.0 ** (-n / 2.0) / math.gamma(n / 2.0 + 1.0)
    return bessel_j(n / 2.0, xi_norm) / xi_norm ** (n / 2.0)


def ball_ft_asymptotic(n: int, xi_norm: float) -> float:
    """Leading oscillatory form 2 cos(|xi| + phi_n) / (sqrt(2 pi) |xi|^{(n+1)/2})
    with the standard order-n/2 Bessel phase phi_n = -(n+1) pi / 4."""
    if n not in (1, 2, 3):
        raise UnsupportedDimension(f"ball transform supports n in 1..3, got {n}")
    if xi_norm < 5.0:
        raise ArgumentTooSmall(f"asymptotic form needs |xi| >= 5, got {xi_norm}")
    phi = -(n + 1) * math.pi / 4.0
    return 2.0 * math.cos(xi_norm + phi) / (math.sqrt(2.0 * math.pi)
                                            * xi_norm ** ((n + 1) / 2.0))


# ---------------------------------------------------------------------------
# Stationary phase for quadratic model phases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StationaryPhaseProblem:
    """Oscillatory integral of exp(i x.Hx / (2 hbar)) * a(x) over R^d.

    The amplitude is a callable on points of shape (k, d); `scale` is its
    derivative scale delta (the regime requires delta^2 >= hbar) and
    `support_radius` bounds its support.  `exact_derivatives`, when given,
    maps a multi-index tuple to the exact partial derivative of a at 0 and
    bypasses the finite-difference stencils.
    """

    dim: int
    hessian: np.ndarray = field(repr=False)
    amplitude: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    scale: float
    support_radius: float
    hbar: float
    exact_derivatives: Callable[[tuple], float] | None = field(
        default=None, compare=False)

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.hessian, dtype=float))
        object.__setattr__(self, "hessian", H)
        if self.dim not in (1, 2) or H.shape != (self.dim, self.dim):
            raise FblError(f"phase matrix must be {self.dim}x{self.dim}")
        if np.abs(H - H.T).max() > 0:
            raise FblError("phase matrix must be symmetric")
        if abs(np.linalg.det(H)) < 1e-8:
            raise DegeneratePhase(f"|det H| = {abs(np.linalg.det(H)):.3g} < 1e-8")
        if not (0 < self.scale <= 1.0):
            raise FblError("amplitude scale must lie in (0, 1]")
        if not (0 < self.hbar <= 1.0):
            raise FblError("hbar must lie in (0, 1]")
        if self.scale**2 < self.hbar:
            raise FblError(
                f"mild-amplitude regime needs scale^2 >= hbar "
                f"(scale={self.scale}, hbar={self.hbar})")


def _fd_weights(order: int, offsets: np.ndarray) -> np.ndarray:
    """Finite-difference weights on given integer offsets for the m-th
    derivative at 0 (Fornberg's recurrence)."""
    n = len(offsets)
    if order >= n:
        raise FblError("not enough stencil points")
    # solve the Vandermonde moment system: sum w x^k = k! [k == order]
    A = np.vander(offsets, n, increasing=True).T.astype(float)
    b = np.zeros(n)
    b[order] = math.factorial(order)
    return np.linalg.solve(A, b)


_STENCIL = np.arange(-4, 5)


def _derivatives_on_stencil(problem: StationaryPhaseProblem, step: float):
    """Tabulate amplitude samples on the tensor stencil around 0."""
    if problem.dim == 1:
        pts = (_STENCIL * step)[:, None]
        return problem.amplitude(pts).reshape(len(_STENCIL))
    X, Y = np.meshgrid(_STENCIL * step, _STENCIL * step, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return problem.amplitude(pts).reshape(len(_STENCIL), len(_STENCIL))


def _partial(problem: StationaryPhaseProblem, samples, step: float,
             orders: tuple) -> float:
    if problem.exact_derivatives is not None:
        return float(problem.exact_derivatives(tuple(orders)))
    if problem.dim == 1:
        w = _fd_weights(orders[0], _STENCIL) / step ** orders[0]
        return float(w @ samples)
    wx = _fd_weights(orders[0], _STENCIL) / step ** orders[0]
    wy = _fd_weights(orders[1], _STENCIL) / step ** orders[1]
    return float(wx @ samples @ wy)


def stationary_phase_expand(problem: StationaryPhaseProblem, order: int) -> complex:
    """Normalized expansion through `order` terms (order in {1, 2, 3}).

    Multiply by (2 pi i hbar)^{d/2} to approximate the integral itself.
    Derivatives of the amplitude come from 4th-order central differences at
    step scale/64 unless exact derivatives were supplied.
    """
    if order not in (1, 2, 3):
        raise FblError(f"expansion order must be 1, 2, or 3, got {order}")
    H = problem.hessian
    eigs = np.linalg.eigvalsh(H)
    alpha = int((eigs < 0).sum())
    hinv = np.linalg.inv(H)
    d = problem.dim
    step = problem.scale / 64.0
    samples = None if problem.exact_derivatives is not None \
        else _derivatives_on_stencil(problem, step)

    def partial(*orders):
        return _partial(problem, samples, step, orders)

    terms = []
    # k = 0
    terms.append(partial(0) if d == 1 else partial(0, 0))
    if order >= 2:
        # L a = (i/2) sum_ij Hinv_ij d_i d_j a
        if d == 1:
            la = 0.5j * hinv[0, 0] * partial(2)
        else:
            la = 0.5j * (hinv[0, 0] * partial(2, 0)
                         + 2.0 * hinv[0, 1] * partial(1, 1)
                         + hinv[1, 1] * partial(0, 2))
        terms.append(problem.hbar * la)
    if order >= 3:
        # L^2 a = -(1/4) sum Hinv_ij Hinv_kl d_i d_j d_k d_l a
        if d == 1:
            l2 = -(0.25) * hinv[0, 0] ** 2 * partial(4)
        else:
            c = hinv
            l2 = 0.0
            for i in range(2):
                for j in range(2):
                    for k in range(2):
                        for m in range(2):
                            orders = [0, 0]
                            for ax in (i, j, k, m):
                                orders[ax] += 1
                            l2 += c[i, j] * c[k, m] * partial(*orders)
            l2 *= -0.25
        terms.append(problem.hbar**2 * l2 / 2.0)

    prefactor = (1j) ** (-alpha) / math.sqrt(abs(np.linalg.det(H)))
    return complex(prefactor * sum(terms))


def phase_prefactor(dim: int, hbar: float) -> complex:
    """(2 pi i hbar)^{d/2} on the principal branch."""
    return complex(2.0 * math.pi * hbar) ** (dim / 2.0) \
        * np.exp(1j * math.pi / 4.0) ** dim


def _gauss_panels_complex(lo, hi, panels, nodes=16):
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


MAX_ORACLE_SAMPLES = 1_000_000


def brute_force_oscillatory(problem: StationaryPhaseProblem,
                            tol: float = 1e-9) -> complex:
    """Composite Gauss-Legendre oracle with at least 16 nodes per oscillation
    period per axis (and per amplitude scale); the panel count doubles until
    two refinements agree to tol times the support volume."""
    d = problem.dim
    R = problem.support_radius
    H = problem.hessian
    hnorm = float(np.abs(np.linalg.eigvalsh(H)).max())
    periods = hnorm * R * R / (4.0 * math.pi * problem.hbar)
    per_axis = max(int(16 * (periods + 1)), int(16 * R / problem.scale), 64)
    if per_axis ** d > MAX_ORACLE_SAMPLES:
        raise BudgetExceeded(
            f"{per_axis}^{d} oracle samples exceed the {MAX_ORACLE_SAMPLES} budget")
    volume = (2.0 * R) ** d
    panels = max(per_axis // 16, 4)

    def evaluate(npanels):
        x, w = _gauss_panels_complex(-R, R, npanels)
        if d == 1:
            pts = x[:, None]
            phase = 0.5 * H[0, 0] * x * x
            vals = problem.amplitude(pts) * np.exp(1j * phase / problem.hbar)
            return complex(vals @ w)
        X, Y = np.meshgrid(x, x, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        phase = 0.5 * (H[0, 0] * pts[:, 0] ** 2
                       + 2.0 * H[0, 1] * pts[:, 0] * pts[:, 1]
                       + H[1, 1] * pts[:, 1] ** 2)
        vals = problem.amplitude(pts) * np.exp(1j * phase / problem.hbar)
        W = np.outer(w, w).ravel()
        return complex(vals @ W)

    value = evaluate(panels)
    while True:
        panels *= 2
        if (panels * 16) ** d > 4 * MAX_ORACLE_SAMPLES:
            raise BudgetExceeded(
                "refinement exceeded the oracle budget before reaching "
                f"tolerance {tol:g}")
        refined = evaluate(panels)
        if abs(refined - value) <= tol * volume:
            return refined
        value = refined
