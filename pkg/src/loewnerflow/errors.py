"""Exception hierarchy shared by every module of the package."""


class LoewnerError(Exception):
    """Base class for all errors raised by loewnerflow."""


class DegenerateInput(LoewnerError, ValueError):
    """A map was evaluated at a point where its image is infinite."""


class ConfigError(LoewnerError, ValueError):
    """Malformed configuration, parameters or CLI literal."""


class ValidationFailure(LoewnerError):
    """A Herglotz-function or driving-signal check failed.

    ``report`` holds the offending :class:`~loewnerflow.verify.VerificationReport`
    when one was produced.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalFailure(LoewnerError):
    """The integrator left the domain or ran out of steps."""


class NotAGenerator(LoewnerError):
    """Berkson-Porta decomposition produced a function with negative real part."""


class AmbiguousDecomposition(LoewnerError):
    """More than one admissible driving point was found."""


class ContractionFailure(LoewnerError):
    """Picard iteration requested on a window where it is not a contraction."""


class QuadratureFailure(LoewnerError):
    """An extrapolated limit could not be resolved numerically."""
