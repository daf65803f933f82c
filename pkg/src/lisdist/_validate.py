import math
import numbers

from .errors import DomainError


def check_int(name, value, lo=None, hi=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise DomainError(f"{name} must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise DomainError(f"{name} must be <= {hi}, got {value}")
    return value


def check_real(name, value, lo=None, hi=None, strict_lo=False):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}") from None
    if math.isnan(x):
        raise DomainError(f"{name} is NaN")
    if lo is not None and (x < lo or (strict_lo and x == lo)):
        raise DomainError(f"{name} out of range: {x}")
    if hi is not None and x > hi:
        raise DomainError(f"{name} out of range: {x}")
    return x
