"""Exception taxonomy for the laboratory.

Every failure mode that callers are expected to handle gets its own class;
all of them derive from FblError so the CLI can map "bad config" vs
"numerics blew up" onto distinct exit codes.
"""


class FblError(Exception):
    """Base class for all package errors."""


class ConfigError(FblError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""


# --- grid_geometry ---------------------------------------------------------

class EmptyMaskWarning(UserWarning):
    """A region selected no grid nodes."""


# --- schrodinger -----------------------------------------------------------

class ResolutionTooCoarse(FblError):
    """Grid spacing violates the eight-points-per-wavelength rule."""

    def __init__(self, h, h_max, hbar):
        self.h, self.h_max, self.hbar = h, h_max, hbar
        super().__init__(
            f"grid spacing h={h:.6g} exceeds the resolution limit "
            f"{h_max:.6g} at hbar={hbar:.6g} (need >= 8 points per de "
            f"Broglie wavelength)")


class BoxTooSmall(FblError):
    """The potential at the box walls does not dominate mu + margin."""

    def __init__(self, wall_value, required):
        self.wall_value, self.required = wall_value, required
        super().__init__(
            f"potential at boundary cells is {wall_value:.6g}, needs at "
            f"least {required:.6g} for a faithful Dirichlet truncation")


class EmptyDroplet(FblError):
    """{V < mu} contains no grid point / no volume."""


# --- spectral --------------------------------------------------------------

class NoConvergence(FblError):
    """The eigensolver failed to converge."""


class MatrixTooLarge(FblError):
    """Dense non-separable eigenproblem beyond the supported size."""


class CutoffTooLow(FblError):
    """Retained spectral range does not cover the requested energy."""


# --- fermion_state ---------------------------------------------------------

class EmptyOccupation(FblError):
    """No eigenvalue at or below the Fermi energy."""


class NotAProjection(FblError):
    """Matrix fails the symmetric-idempotent check."""


class DegenerateSpectrum(FblError):
    """All restricted eigenvalues sit at 0 or 1; the entropy sandwich
    degenerates.  Carries the (zero) entropy for convenience."""

    def __init__(self, entropy=0.0):
        self.entropy = entropy
        super().__init__("j2_squared = 0: every restricted eigenvalue is 0 or 1")


class TooManyParameters(FblError):
    """Poisson-binomial convolution refused (N too large)."""


class ZeroVariance(FblError):
    """Gaussianity diagnostics need a nondegenerate counting law."""


class SingularDeterminant(FblError):
    """Fredholm determinant factorization hit a non-positive pivot."""

    def __init__(self, sign):
        self.sign = sign
        super().__init__(f"log-determinant undefined: determinant sign {sign}")


# --- sampling --------------------------------------------------------------

class NumericalBreakdown(FblError):
    """Residual kernel trace drifted during sequential sampling."""

    def __init__(self, step, drift):
        self.step, self.drift = step, drift
        super().__init__(
            f"residual trace drift {drift:.3e} at sampling step {step}")


# --- predictions -----------------------------------------------------------

class RegionNotInBulk(FblError):
    """Region closure reaches the droplet boundary."""


class OutsideBulk(FblError):
    """Disk radius outside the classically allowed region."""


class NonIntegrable(FblError):
    """g(lambda)/(lambda(1-lambda)) is not integrable on (0, 1)."""


# --- oscint ----------------------------------------------------------------

class UnsupportedDimension(FblError):
    """Ball transform only implemented for n in {1, 2, 3}."""


class ArgumentTooSmall(FblError):
    """Asymptotic form requested below its validity threshold."""


class DegeneratePhase(FblError):
    """Phase Hessian is (numerically) singular."""


class BudgetExceeded(FblError):
    """Oscillatory quadrature would exceed the sample budget."""


# --- experiments_cli -------------------------------------------------------

class InsufficientPoints(FblError):
    """Too few sweep points for a least-squares fit."""


class IoFailure(FblError):
    """Could not persist experiment outputs."""
