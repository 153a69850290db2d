"""Exception types shared across the package."""


class GdnlsError(Exception):
    """Base class for all package-specific errors."""


class NonFiniteInput(GdnlsError):
    """A field or scalar argument contains NaN or Inf."""


class GridMismatch(GdnlsError):
    """Two fields live on different grids."""


class DomainViolation(GdnlsError):
    """Parameters outside the existence region (c^2 < 4*omega, sigma in (0, 2))."""


class TruncationTooSmall(GdnlsError):
    """The periodic box is too small: soliton tails exceed 1e-12 at the boundary."""


class NoConvergence(GdnlsError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, msg, value=None, est_error=None):
        super().__init__(msg)
        self.value = value
        self.est_error = est_error


class NoSignChange(GdnlsError):
    """Root bracketing scan found no sign change."""


class RootNotUnique(GdnlsError):
    """Root bracketing scan found more than one sign change."""

    def __init__(self, msg, brackets=()):
        super().__init__(msg)
        self.brackets = list(brackets)


class SymmetryViolation(GdnlsError):
    """A matrix that must be symmetric (up to tolerance) is not."""


class NotDegenerate(GdnlsError):
    """The action Hessian has no near-zero singular value at these parameters."""


class Kappa0Mismatch(GdnlsError):
    """The two independent extractions of kappa0 disagree beyond tolerance."""


class EigenFailure(GdnlsError):
    """Eigenvalue solve failed or returned unusable results."""


class BlowupDetected(GdnlsError):
    """max|u| exceeded the blowup threshold or NaN appeared during integration."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


class StepTooLarge(GdnlsError):
    """dt violates the adaptive advective stability guard."""

    def __init__(self, msg, t=None, dt_max=None):
        super().__init__(msg)
        self.t = t
        self.dt_max = dt_max


class OutsideTube(GdnlsError):
    """Field is too far from the soliton orbit for modulation decomposition."""

    def __init__(self, msg, distance=None, radius=None):
        super().__init__(msg)
        self.distance = distance
        self.radius = radius


class NewtonDiverged(GdnlsError):
    """Modulation Newton iteration failed; best iterate attached."""

    def __init__(self, msg, state=None):
        super().__init__(msg)
        self.state = state


class CutoffTooLarge(GdnlsError):
    """Requested cutoff radius does not fit in the periodic box."""


class InsufficientSampling(GdnlsError):
    """Trajectory records are too sparse for a finite-difference rate check."""
