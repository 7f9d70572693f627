"""Exception hierarchy.

Every error carries a short machine-readable ``code`` and, when one parameter
is at fault, its name in ``param``.  The CLI maps :class:`ValidationError` to
exit status 2 and :class:`NumericalError` to exit status 3.
"""


class CausalPredError(Exception):
    code = "error"

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class ValidationError(CausalPredError, ValueError):
    """Bad input, bad format or a violated precondition."""

    code = "validation"


class ParameterError(ValidationError):
    code = "bad_parameter"


class FormatError(ValidationError):
    code = "bad_format"


class ResolutionError(ValidationError):
    """A grid is too coarse for the requested operation."""

    code = "resolution"


class DomainError(ValidationError):
    code = "domain"


class SizeError(ValidationError):
    """The evaluable or compared range is empty."""

    code = "size"


class DegenerateSupportError(ValidationError):
    code = "degenerate_support"


class NumericalError(CausalPredError, ArithmeticError):
    code = "numerical"


class StabilityError(NumericalError):
    """Kernel spec whose transfer function overflows double precision."""

    code = "kernel_overflow"


class ReconstructionError(NumericalError):
    """Computed kernel taps do not reproduce the transfer function."""

    code = "kernel_reconstruction"
