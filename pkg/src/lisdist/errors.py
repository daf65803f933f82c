"""Exception types shared across the package."""


class LisdistError(Exception):
    pass


class DomainError(LisdistError, ValueError):
    pass


class NonFinite(LisdistError, FloatingPointError):
    pass


class SingularSystem(LisdistError, ArithmeticError):
    pass


class ResourceLimit(LisdistError):
    pass


class NoConvergence(LisdistError, RuntimeError):
    pass


class ToleranceExceeded(LisdistError, AssertionError):
    pass


class TruncationWarning(UserWarning):
    pass
