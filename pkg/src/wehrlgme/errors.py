"""Exception and warning types shared across the package."""


class WehrlGmeError(Exception):
    """Base class for all package-specific errors."""


class DegenerateStateError(WehrlGmeError):
    """All polynomial coefficients of a constellation vanished (numeric corruption)."""


class ComplexityLimitError(WehrlGmeError):
    """Requested computation exceeds the configured work budget."""


class ShapeMismatchError(WehrlGmeError):
    """Input dimensions do not match the model or sequence."""


class InsufficientDataError(WehrlGmeError):
    """Training set smaller than the batch size."""


class NearZeroReferenceError(WehrlGmeError):
    """Reference GME below the exclusion threshold; caller should exclude and count."""


class EmptyInputError(WehrlGmeError):
    """An aggregate was requested over an empty collection."""


class SchemaError(WehrlGmeError):
    """A dataset or model file does not match the expected schema."""


class DegenerateDenominatorWarning(UserWarning):
    """Extrapolation denominator vanished; an earlier table level was returned."""


class NonGenericStateWarning(UserWarning):
    """Asymptotic residual failed to flatten; the state likely has degenerate maxima."""
