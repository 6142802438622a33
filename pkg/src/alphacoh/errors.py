"""Exception hierarchy shared by all modules."""


class AlphaCohError(ValueError):
    """Base class for every domain error raised by the package."""


class TruncationError(AlphaCohError):
    """A state does not fit in the requested Fock truncation."""


class HeadroomError(AlphaCohError):
    """A transformation would push weight outside the representable window."""


class DimensionError(AlphaCohError):
    """Operands live on spaces of different size."""


class VanishedResidualError(AlphaCohError):
    """Asked to optimise the overlap of a state with (numerically) zero norm."""


class ConsistencyError(AlphaCohError):
    """Two independent computations that must agree did not."""


class SingularPError(AlphaCohError):
    """The P function of the requested state is not a regular density."""


class QuadratureError(AlphaCohError):
    """A gridded density failed its normalisation check."""
