"""Exception hierarchy shared by every module of the package."""


class KlyachkoError(Exception):
    """Base class for all errors raised by this package."""


class FieldError(KlyachkoError, ValueError):
    pass


class DimensionError(KlyachkoError, ValueError):
    pass


class SingularMatrixError(KlyachkoError, ValueError):
    pass


class MembershipError(KlyachkoError, ValueError):
    """A matrix is not in the group an operation requires."""


class ShapeError(KlyachkoError, ValueError):
    """Invalid (n, r, r') data, e.g. a parity violation."""


class PreconditionError(KlyachkoError, ValueError):
    pass


class BudgetExceeded(KlyachkoError):
    def __init__(self, what, cardinality, budget):
        self.what = what
        self.cardinality = cardinality
        self.budget = budget
        super().__init__(
            f"{what}: cardinality {cardinality} exceeds budget {budget}"
        )


class UnsupportedField(KlyachkoError):
    pass


class TheoryViolation(KlyachkoError):
    """A step the construction guarantees did not hold.

    Never expected; raised loudly instead of being swallowed.
    """

    def __init__(self, message, trace=()):
        self.trace = list(trace)
        super().__init__(message)


class CertificateFormatError(KlyachkoError, ValueError):
    pass
