"""Exception and warning types shared across the package.

Exceptions carry an ``exit_code`` used by the CLI to map failures onto a
stable, documented exit-code table (see README).
"""


class HomtpaError(Exception):
    """Base class for package errors."""

    exit_code = 1


class ConfigError(HomtpaError):
    """Invalid or inconsistent configuration / input files."""

    exit_code = 2


class GridAliasingError(HomtpaError):
    """Frequency grid too coarse to sample the delay oscillation."""

    exit_code = 3


class NonConvergentError(HomtpaError):
    """Quadrature did not converge under grid refinement."""

    exit_code = 3


class NotConvergedError(HomtpaError):
    """Nonlinear fit failed to converge."""

    exit_code = 3


class FitDivergedError(HomtpaError):
    """Model fit residual too large relative to the signal."""

    exit_code = 3


class NoDipError(HomtpaError):
    """Interferogram contains no usable dip."""

    exit_code = 4


class EdgeDipError(HomtpaError):
    """Dip minimum sits at the edge of the scanned delay range."""

    exit_code = 4


class GridMismatchError(HomtpaError):
    """Two interferograms do not share a delay grid."""

    exit_code = 4


class InsufficientPointsError(HomtpaError):
    """Not enough data points for the requested regression."""

    exit_code = 4


class GridTooCoarseWarning(UserWarning):
    """Diagnostic: spectral grid resolution below the recommended floor."""


class IdentifiabilityWarning(UserWarning):
    """Fit Jacobian is ill-conditioned; parameters are nearly degenerate."""


class NegativeOffsetWarning(UserWarning):
    """Sample exceeds solvent in the long-delay channel; suspect data."""


class NonDipRegimeWarning(UserWarning):
    """Closed-form dip is inverted (absorption term exceeds reference depth)."""


class MonotonicityWarning(UserWarning):
    """Fitted efficiencies are not monotone in concentration."""
