"""Closed-form constants and asymptotic coefficients for the sweep fits.

Everything here is mesh-independent: unit-ball volumes, the boundary-integral
variance coefficient, its closed disk form, limits of normalized spectral
sums for test functions vanishing at 0 and 1, and the universal
entropy/variance ratio pi^2/3.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import NonIntegrable, OutsideBulk, RegionNotInBulk
from .grid import Region
from .schrodinger import Potential


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n: pi^(n/2) / Gamma(n/2 + 1).

    Defined for n >= 0; the n = 0 value is 1 and enters the 1D variance
    coefficient.
    """
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def variance_coefficient(region: Region, potential: Potential, mu: float,
                         f: Callable[[np.ndarray], np.ndarray] | None = None,
                         panels: int = 256) -> float:
    """Boundary-integral coefficient of the log-growth of the number variance:

        (c_{n-1} / 2 pi^2) * integral over the region boundary of
        (mu - V)_+^{(n-1)/2} f^2.

    Exact finite sum over the two endpoints in 1D; composite Gauss
    quadrature on the analytic boundary parametrization in 2D.  The region
    closure must sit strictly inside the droplet.
    """
    n = region.dim
    pts, wts = region.boundary_quadrature(panels=panels)
    V = potential.evaluate(pts)
    excess = mu - V
    if float(excess.min()) < 1e-6:
        raise RegionNotInBulk(
            f"max V on the region boundary is {float(V.max()):.6g}, too close "
            f"to mu = {mu:.6g}")
    fv = np.ones(len(pts)) if f is None else np.asarray(f(pts), dtype=float)
    integrand = excess ** ((n - 1) / 2.0) * fv**2
    return ball_volume(n - 1) / (2.0 * math.pi**2) * float(integrand @ wts)


def disk_variance_coefficient(n: int, r: float, v_of_r: float, mu: float) -> float:
    """Closed form of the variance coefficient for a centered disk of radius r
    under a rotation-invariant potential with V(|x|=r) = v_of_r:

        (2 pi r)^(n-1) (mu - v(r))^((n-1)/2) / (pi^2 Gamma(n)).
    """
    if not v_of_r < mu:
        raise OutsideBulk(f"v(r) = {v_of_r} must lie below mu = {mu}")
    return ((2.0 * math.pi * r) ** (n - 1) * (mu - v_of_r) ** ((n - 1) / 2.0)
            / (math.pi**2 * math.gamma(n)))


def g_weight_integral(g: Callable[[np.ndarray], np.ndarray],
                      tol: float = 1e-8) -> float:
    """Integral over (0,1) of g(lambda) / (lambda (1 - lambda)).

    The substitution lambda = u^2 (3 - 2u) maps [0,1] onto itself with a
    double zero of the Jacobian at both ends, removing the integrable
    endpoint singularities whenever g vanishes linearly at 0 and 1.
    """
    def integrand(u):
        lam = u * u * (3.0 - 2.0 * u)
        jac = 6.0 * u * (1.0 - u)
        if lam <= 0.0 or lam >= 1.0:
            return 0.0
        return g(np.array([lam]))[0] / (lam * (1.0 - lam)) * jac

    val, err = quad(integrand, 0.0, 1.0, limit=200)
    if not math.isfinite(val) or err > max(tol, 1e-10 * abs(val)):
        raise NonIntegrable(
            f"g/(lambda(1-lambda)) quadrature error {err:.3g} exceeds {tol:.3g}")
    return val


def widom_limit(g: Callable[[np.ndarray], np.ndarray], c_omega: float) -> float:
    """Conjectured limit of the normalized spectral sum for a test function g
    with g(0) = g(1) = 0: twice c_omega times the g-weight integral."""
    return 2.0 * c_omega * g_weight_integral(g)


def entropy_variance_target() -> float:
    """Universal, dimension-independent entropy/variance ratio pi^2/3."""
    return math.pi**2 / 3.0
