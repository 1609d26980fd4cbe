"""Exception types raised across the toolkit.

Every named error subclasses :class:`EigenwellsError` so callers can catch
toolkit failures with a single except clause.  Configuration problems raise
:class:`ConfigError`; everything else signals a computational failure.
"""


class EigenwellsError(Exception):
    """Base class for all toolkit errors."""


class InvalidDimension(EigenwellsError):
    """Grid dimension outside {1, 2}."""


class ZeroExtent(EigenwellsError):
    """Nonpositive extent or cell count along some axis."""


class IndexOutOfRange(EigenwellsError):
    """Node index outside [0, node_count)."""


class LengthMismatch(EigenwellsError):
    """Coefficient array length does not match the grid node count."""


class NonpositiveCoefficient(EigenwellsError):
    """Diffusion or mass coefficient is not strictly positive."""


class NegativePotential(EigenwellsError):
    """Potential value below zero."""


class EmptyIndexSet(EigenwellsError):
    """Operation received an empty index set."""


class DegeneratePotential(EigenwellsError):
    """Potential vanishes identically; the operator is singular."""


class NoConvergence(EigenwellsError):
    """Iterative solver failed to reach the requested tolerance."""


class NonpositiveLandscape(EigenwellsError):
    """Computed landscape has a nonpositive entry (solver failure)."""


class NegativeLevel(EigenwellsError):
    """Sublevel or shift parameter below zero where positivity is required."""


class EmptySourceSet(EigenwellsError):
    """Distance computation received no source nodes."""


class OverlappingComponents(EigenwellsError):
    """Component lists expected to be disjoint share a node."""


class EmptyWellSet(EigenwellsError):
    """Sublevel set is empty at the requested threshold."""


class KExceedsDof(EigenwellsError):
    """More eigenpairs requested than degrees of freedom."""


class EmptyOmega(EigenwellsError):
    """Well neighborhood is empty (cannot restrict the operator)."""


class InadmissibleTestFunction(EigenwellsError):
    """Test function fails to vanish where the eigenvector's Dirichlet set requires."""


class StaleLandscape(EigenwellsError):
    """Landscape residual too large for an exact-identity check."""


class HypothesisViolated(EigenwellsError):
    """Bound hypotheses not met (reported on the check, not usually raised)."""


class InsufficientData(EigenwellsError):
    """Not enough data points for the requested aggregation or fit."""


class AllZeroRealization(EigenwellsError):
    """Random potential came out identically zero."""


class ConfigError(EigenwellsError):
    """Invalid, missing, or unknown configuration entry."""
