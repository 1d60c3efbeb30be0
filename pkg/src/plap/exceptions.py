"""Exception hierarchy for the package."""


class PlapError(Exception):
    """Base class for all package errors."""


class ParameterError(PlapError, ValueError):
    """Invalid problem parameters."""


class RangeError(ParameterError):
    """The diffusion exponent lies outside the fast-diffusion range 1 < p < 2."""


class AdmissibilityError(ParameterError):
    """Negative reaction coefficient combined with a sublinear exponent."""


class PositivityError(ParameterError):
    """A parameter that must be strictly positive is not."""


class DomainError(PlapError, ValueError):
    """A formula was evaluated outside the parameter set where it is defined."""


class MissingProfileInput(PlapError, ValueError):
    """A constant needs profile data (A0, A1, lambda, ell1) that was not supplied."""


class OnFreeBoundary(PlapError, ValueError):
    """A barrier derivative was requested on (or within the collar of) its support edge."""


class TailUnderflow(PlapError, ArithmeticError):
    """The requested profile value is below the representable range."""


class PicardDivergence(PlapError, RuntimeError):
    """Lagged-coefficient iteration failed to converge within its budget."""


class SupportEdgeOutOfDomain(PlapError, RuntimeError):
    """The extracted support edge is too close to the computational boundary."""


class DegenerateFit(PlapError, ValueError):
    """Power-law fit is not defined for the supplied samples."""


class WindowTooNoisy(PlapError, ValueError):
    """Tail regression over the window is not a clean straight line."""


class ClipWarning(UserWarning):
    """Nonnegativity clipping removed a non-negligible amount of mass."""


class MaximizerAtBoundary(UserWarning):
    """Golden-section maximizer landed at the end of the search interval."""
