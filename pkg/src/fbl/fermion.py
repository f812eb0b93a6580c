"""Fermi projector, restricted spectrum, and the ground-state functionals.

The low-rank factor U (orthonormal occupied eigenvectors) carries the whole
state: the kernel is U U^T / h^n, and every Schatten/entropy functional of
the commutator with a region indicator reduces to the spectrum {sigma_n} of
the N x N Gram matrix U_R^T U_R, because 1_R P 1_R and the full operator
share their nonzero spectrum.  For projections P, Q the nonzero spectrum of
-[P,Q]^2 is {sigma(1-sigma)}, each value twice, which turns the trace-norm
of the commutator - analytically the hard object - into the exact finite sum
2 * sum sqrt(sigma(1-sigma)) in the discrete model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import ndtr, xlogy

from .errors import (DegenerateSpectrum, EmptyOccupation, FblError,
                     NotAProjection, SingularDeterminant, TooManyParameters,
                     ZeroVariance)
from .spectral import SpectralData, fermi_count

CLAMP_SOFT = 1e-9    # expected eigensolver noise outside [0, 1]
CLAMP_HARD = 1e-6    # beyond this, something is genuinely wrong


def binary_entropy(lam: np.ndarray) -> np.ndarray:
    """s(lambda) = -lambda log lambda - (1-lambda) log(1-lambda), with
    0 log 0 = 0."""
    lam = np.asarray(lam, dtype=float)
    return -(xlogy(lam, lam) + xlogy(1.0 - lam, 1.0 - lam))


# ---------------------------------------------------------------------------
# Projector and restricted spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FermiProjector:
    """Orthonormal factor of the spectral projection onto energies <= mu."""

    U: np.ndarray = field(repr=False)   # (num_nodes, N), U^T U = I_N
    hbar: float
    mu: float
    grid_fingerprint: tuple
    grid_weight: float                  # h^n; kernel is U U^T / h^n

    @property
    def count(self) -> int:
        return self.U.shape[1]

    def kernel_diagonal(self) -> np.ndarray:
        """Pi(x, x) at the grid nodes."""
        return (self.U * self.U).sum(axis=1) / self.grid_weight

    def occupation_probabilities(self) -> np.ndarray:
        """Diagonal of the discrete kernel U U^T (sums to N)."""
        return (self.U * self.U).sum(axis=1)


def fermi_projector(spectral: SpectralData, mu: float) -> FermiProjector:
    n_occ = fermi_count(spectral, mu)
    if n_occ == 0:
        raise EmptyOccupation(f"no eigenvalue at or below mu = {mu}")
    return FermiProjector(U=spectral.eigenvectors[:, :n_occ],
                          hbar=spectral.hbar, mu=float(mu),
                          grid_fingerprint=spectral.grid_fingerprint,
                          grid_weight=spectral.grid_weight)


@dataclass(frozen=True)
class RestrictedSpectrum:
    """Eigenvalues of 1_R Pi 1_R, descending, clamped to [0, 1]."""

    sigma: np.ndarray = field(repr=False)
    region_fingerprint: tuple
    hbar: float
    trace: float

    @property
    def count(self) -> int:
        return len(self.sigma)


def _clamp_unit(values: np.ndarray, what: str) -> np.ndarray:
    low, high = float(values.min(initial=0.0)), float(values.max(initial=0.0))
    if low < -CLAMP_HARD or high > 1.0 + CLAMP_HARD:
        raise FblError(
            f"{what} out of [0,1] beyond the {CLAMP_HARD} guard: "
            f"range [{low:.3e}, {high:.3e}]")
    return np.clip(values, 0.0, 1.0)


def restricted_spectrum(proj: FermiProjector, mask: np.ndarray,
                        region_fingerprint: tuple = ()) -> RestrictedSpectrum:
    """Spectrum of the restriction via the N x N Gram matrix of masked rows."""
    mask = np.asarray(mask)
    rows = proj.U[mask] if mask.dtype != bool else proj.U[np.flatnonzero(mask)]
    gram = rows.T @ rows
    trace = float(np.trace(gram))
    sigma = np.linalg.eigvalsh(gram)[::-1]
    if abs(sigma.sum() - trace) > 1e-9 * max(1.0, abs(trace)):
        raise FblError("restricted spectrum lost the Gram trace")
    sigma = _clamp_unit(sigma, "restricted eigenvalues")
    return RestrictedSpectrum(sigma=sigma, region_fingerprint=region_fingerprint,
                              hbar=proj.hbar, trace=trace)


# ---------------------------------------------------------------------------
# Commutator functionals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorReport:
    """Number variance, commutator Schatten norms, and entanglement entropy,
    all as exact sums over the restricted spectrum."""

    variance: float      # sum sigma(1-sigma)
    j2_squared: float    # squared Hilbert-Schmidt norm = 2 * variance
    j1: float            # trace norm = 2 * sum sqrt(sigma(1-sigma))
    entropy: float       # sum s(sigma), single counting


def commutator_report(restricted: RestrictedSpectrum) -> CommutatorReport:
    sigma = restricted.sigma
    tau = sigma * (1.0 - sigma)
    variance = float(tau.sum())
    return CommutatorReport(variance=variance,
                            j2_squared=2.0 * variance,
                            j1=2.0 * float(np.sqrt(tau).sum()),
                            entropy=float(binary_entropy(sigma).sum()))


@dataclass(frozen=True)
class SpectralLinkReport:
    """Comparison of spec(-[P,Q]^2) against the doubled {sigma(1-sigma)}."""

    multiset_gap: float
    trace_gap: float
    matched: int
    ok: bool


def spectral_link_check(P: np.ndarray, Q: np.ndarray,
                        tol: float = 1e-8) -> SpectralLinkReport:
    """Verify, for two projection matrices, that the nonzero spectrum of
    -[P,Q]^2 equals {lambda(1-lambda) : lambda in spec(PQP), lambda > 0} with
    every value doubled, and the matching trace identity."""
    P = np.asarray(P, float)
    Q = np.asarray(Q, float)
    if P.shape[0] > 64:
        raise FblError("spectral link check is a small-matrix diagnostic (dim <= 64)")
    for name, A in (("P", P), ("Q", Q)):
        if np.abs(A - A.T).max() > 1e-10 or np.abs(A @ A - A).max() > 1e-10:
            raise NotAProjection(f"{name} is not a symmetric idempotent")

    lam = np.linalg.eigvalsh(P @ Q @ P)
    lam = _clamp_unit(lam, "PQP eigenvalues")
    tau_link = lam * (1.0 - lam)
    comm = P @ Q - Q @ P
    omega = np.linalg.eigvalsh(-comm @ comm)

    cut = 1e-9
    doubled = np.sort(np.repeat(tau_link[tau_link > cut], 2))
    observed = np.sort(omega[omega > cut])
    if len(doubled) != len(observed):
        gap = math.inf
    else:
        gap = float(np.abs(doubled - observed).max(initial=0.0))
    trace_gap = abs(float(omega.sum()) - 2.0 * float(tau_link.sum()))
    ok = gap <= tol and trace_gap <= tol
    return SpectralLinkReport(multiset_gap=gap, trace_gap=trace_gap,
                              matched=len(observed), ok=ok)


class EntropySandwich(NamedTuple):
    lower: float
    entropy: float
    upper: float


def entropy_sandwich(restricted: RestrictedSpectrum) -> EntropySandwich:
    """Single-counting interpolation bounds around the entropy:

        j2_squared <= entropy <= 2 j2_squared log(j1 / j2_squared).

    The pointwise facts behind it: s(sigma) >= 2 tau and
    s(sigma) <= -2 tau log tau for tau = sigma(1-sigma), plus Jensen applied
    to sum tau log(1/sqrt(tau)).
    """
    rep = commutator_report(restricted)
    if rep.j2_squared <= 0.0:
        raise DegenerateSpectrum(entropy=rep.entropy)
    upper = 2.0 * rep.j2_squared * math.log(rep.j1 / rep.j2_squared)
    return EntropySandwich(rep.j2_squared, rep.entropy, upper)


# ---------------------------------------------------------------------------
# Exact counting law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountingLaw:
    """Poisson-binomial law of the count, with exact pmf and cumulants."""

    pmf: np.ndarray = field(repr=False)
    mean: float
    variance: float
    kappa3: float
    kappa4: float

    def cdf(self, k: int) -> float:
        return float(self.pmf[:int(math.floor(k)) + 1].sum())


MAX_LAW_SIZE = 20000


def counting_law(restricted: RestrictedSpectrum) -> CountingLaw:
    """Exact pmf of the count by sequential convolution of the Bernoulli
    factors, O(N^2) in double precision, plus closed cumulant sums."""
    sigma = restricted.sigma
    n = len(sigma)
    if n > MAX_LAW_SIZE:
        raise TooManyParameters(f"{n} Bernoulli parameters exceed {MAX_LAW_SIZE}")
    pmf = np.zeros(n + 1)
    pmf[0] = 1.0
    for t, p in enumerate(sigma):
        head = pmf[:t + 1].copy()
        pmf[:t + 1] = head * (1.0 - p)
        pmf[1:t + 2] += head * p
    pmf = np.maximum(pmf, 0.0)

    tau = sigma * (1.0 - sigma)
    return CountingLaw(pmf=pmf,
                       mean=float(sigma.sum()),
                       variance=float(tau.sum()),
                       kappa3=float((tau * (1.0 - 2.0 * sigma)).sum()),
                       kappa4=float((tau * (1.0 - 6.0 * tau)).sum()))


@dataclass(frozen=True)
class GaussianityReport:
    skewness: float
    excess_kurtosis: float
    ks_half_integer: float


def gaussianity_report(law: CountingLaw) -> GaussianityReport:
    """Normalized third/fourth cumulants and the Kolmogorov distance sampled
    at half-integers (where the lattice CDF is unambiguous)."""
    if law.variance <= 0.0:
        raise ZeroVariance("counting law has zero variance")
    sd = math.sqrt(law.variance)
    ks_points = np.arange(len(law.pmf)) + 0.5
    cdf = np.cumsum(law.pmf)
    gauss = ndtr((ks_points - law.mean) / sd)
    return GaussianityReport(
        skewness=law.kappa3 / law.variance**1.5,
        excess_kurtosis=law.kappa4 / law.variance**2,
        ks_half_integer=float(np.abs(cdf - gauss).max()))


# ---------------------------------------------------------------------------
# Determinantal identities
# ---------------------------------------------------------------------------

def laplace_transform(proj: FermiProjector, weights: np.ndarray) -> float:
    """log E[exp X(w)] = log det(I_N + U^T diag(e^w - 1) U) for node weights w."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (proj.U.shape[0],):
        raise FblError(
            f"weights must cover all {proj.U.shape[0]} grid nodes")
    d = np.expm1(weights)
    A = np.eye(proj.count) + (proj.U * d[:, None]).T @ proj.U
    sign, logdet = np.linalg.slogdet(A)
    if sign <= 0:
        raise SingularDeterminant(sign=float(sign))
    return float(logdet)


def _gram(proj: FermiProjector, mask: np.ndarray) -> np.ndarray:
    rows = proj.U[np.flatnonzero(mask)] if np.asarray(mask).dtype == bool \
        else proj.U[np.asarray(mask)]
    return rows.T @ rows


def cross_covariance(proj: FermiProjector, mask_a: np.ndarray,
                     mask_b: np.ndarray) -> float:
    """Cov(X(A), X(B)) = tr G_{A∩B} - tr(G_A G_B) with G_S = U^T 1_S U."""
    idx_a = np.asarray(mask_a)
    idx_b = np.asarray(mask_b)
    if idx_a.dtype == bool:
        idx_a = np.flatnonzero(idx_a)
    if idx_b.dtype == bool:
        idx_b = np.flatnonzero(idx_b)
    both = np.intersect1d(idx_a, idx_b)
    ga = _gram(proj, idx_a)
    gb = _gram(proj, idx_b)
    tr_ab = float((proj.U[both] * proj.U[both]).sum()) if both.size else 0.0
    return tr_ab - float(np.vdot(ga, gb))


def weighted_gram(proj: FermiProjector, node_weights: np.ndarray) -> np.ndarray:
    """U^T diag(w) U for a bounded node-sampled weight array."""
    w = np.asarray(node_weights, dtype=float)
    return (proj.U * w[:, None]).T @ proj.U


def weighted_variance(proj: FermiProjector, node_weights: np.ndarray) -> float:
    """var X(f) = tr G_{f^2} - tr(G_f^2) for the node-sampled observable f."""
    gf = weighted_gram(proj, node_weights)
    g2 = weighted_gram(proj, np.asarray(node_weights) ** 2)
    return float(np.trace(g2)) - float(np.vdot(gf, gf))


def spectral_functional(restricted: RestrictedSpectrum,
                        g: Callable[[np.ndarray], np.ndarray]) -> float:
    """sum g(sigma_n) with g evaluated after clamping."""
    return float(np.asarray(g(restricted.sigma), dtype=float).sum())


def g_from_config(cfg: dict) -> Callable[[np.ndarray], np.ndarray]:
    """Named test functions on [0, 1] for spectral sums:
    variance, entropy, renyi(alpha), poly(coeffs)."""
    kind = cfg.get("kind")
    if kind == "variance":
        return lambda lam: lam * (1.0 - lam)
    if kind == "entropy":
        return binary_entropy
    if kind == "renyi":
        alpha = float(cfg["alpha"])
        if alpha <= 0 or alpha == 1.0:
            raise FblError("renyi order must be positive and != 1")

        def renyi(lam):
            lam = np.asarray(lam, dtype=float)
            return np.log(lam**alpha + (1.0 - lam) ** alpha) / (1.0 - alpha)
        return renyi
    if kind == "poly":
        coeffs = [float(c) for c in cfg["coeffs"]]

        def poly(lam):
            lam = np.asarray(lam, dtype=float)
            out = np.zeros_like(lam)
            for c in reversed(coeffs):
                out = out * lam + c
            return out
        return poly
    raise FblError(f"unknown g-function kind {kind!r}")
