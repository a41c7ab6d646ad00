"""Exception types raised by the estimation toolkit."""


class TomographyError(Exception):
    """Base class for all toolkit errors."""


class InvariantViolation(TomographyError, ValueError):
    """An input failed a structural invariant (Hermiticity, trace, positivity)."""


class DegenerateModelError(TomographyError, ValueError):
    """All-zero Cholesky parameter vector; the state it encodes is undefined."""


class InversionError(TomographyError, ValueError):
    """Linear tomography produced a nonpositive total-count scale."""


class UnboundedInformationError(TomographyError, ValueError):
    """A projector has zero mean count but nonzero mean derivative, so the
    Poisson Fisher information diverges in that direction."""


class InconsistentDirectionError(TomographyError, ValueError):
    """The requested density derivative is outside the range of the
    symmetrized product map for the given state."""


class CountsParseError(TomographyError, ValueError):
    """A counts file failed to parse; carries the offending line number."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number
