"""Exception hierarchy.

Every error carries a machine-readable ``code`` and the process exit code the
CLI maps it to (2 for invalid input, 3 for numerical failure).
"""


class WaldLabError(Exception):
    code = "ERROR"
    exit_code = 2


class ValidationError(WaldLabError, ValueError):
    code = "VALIDATION"


class InvalidPayoffs(ValidationError):
    code = "INVALID_PAYOFFS"


class DomainError(ValidationError):
    code = "DOMAIN"


class InvalidShare(ValidationError):
    code = "INVALID_SHARE"


class DegenerateShare(ValidationError):
    code = "DEGENERATE_SHARE"


class ResourceError(ValidationError):
    code = "RESOURCE"


class NoInteriorOptimum(ValidationError):
    code = "NO_INTERIOR_OPTIMUM"


class ConvergenceFailure(WaldLabError, ArithmeticError):
    code = "CONVERGENCE_FAILURE"
    exit_code = 3

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class BracketError(ConvergenceFailure):
    code = "BRACKET"


class NumericalInstability(ConvergenceFailure):
    code = "NUMERICAL_INSTABILITY"
