"""Exception hierarchy shared by the numerical modules."""


class AhppError(Exception):
    """Base class for all errors raised by :mod:`ahpp`."""


class MacchiViolation(AhppError, ValueError):
    """A kernel window has spectrum outside [0, 1], so no point process exists."""


class SpectrumError(AhppError, RuntimeError):
    """The symmetric eigensolver failed to converge."""


class DegenerateBasisError(AhppError, RuntimeError):
    """The projection basis lost rank during sequential sampling."""


class InsufficientDecayError(AhppError, ValueError):
    """A test function decays too slowly for the requested truncation tolerance."""


class QuadratureError(AhppError, RuntimeError):
    """A quadrature rule did not reach its tolerance within budget."""


class SpanExhaustedError(AhppError, ValueError):
    """A finite configuration is too short for the requested averaging window."""


class EmptyInteriorError(AhppError, ValueError):
    """No points remain after discarding the boundary margin."""
