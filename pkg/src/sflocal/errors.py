"""Exception types shared across the package."""


class SflocalError(Exception):
    """Base class for all package-specific errors."""


class InvalidModel(SflocalError):
    """Model parameters violate an invariant (bad index, zero required hopping)."""


class DimensionMismatch(SflocalError):
    """Operator and matrix dimensions do not agree."""


class UnsupportedRelation(SflocalError):
    """The requested symmetry relation is not defined for this operator kind."""


class ConvergenceFailure(SflocalError):
    """Eigensolver iteration budget exceeded."""


class LengthMismatch(SflocalError):
    """Spectra of different lengths cannot be matched."""


class GridTooCoarse(SflocalError):
    """Real-root scan grid failed to separate adjacent roots."""


class InvalidRegime(SflocalError):
    """Closed-form solution requested outside its domain of validity."""


class RootCountMismatch(SflocalError):
    """Root finder lost or duplicated roots relative to the expected count."""


class NotInKernel(SflocalError):
    """Boundary-matrix determinant is not small; the root is inadmissible."""


class DefectiveAtEP(SflocalError):
    """Wavefunction construction refused at a defective (exceptional) point."""


class ZeroDenominator(SflocalError):
    """Weight ratio undefined: one side of the ring carries no weight."""


class InsufficientSites(SflocalError):
    """Too few sites for a meaningful localization-length fit."""


class SizeMismatch(SflocalError):
    """State-selection rule failed to produce a state at some system size."""
