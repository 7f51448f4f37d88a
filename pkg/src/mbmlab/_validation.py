"""Small argument checks shared across modules."""

import numbers

import numpy as np

from .exceptions import DomainError

SIDES = ("+", "-")


def check_side(side):
    if side in ("+", 1, "plus"):
        return "+"
    if side in ("-", -1, "minus"):
        return "-"
    raise DomainError(f"side must be '+' or '-', got {side!r}")


def check_open_unit(value, name="h"):
    value = float(value)
    if not 0.0 < value < 1.0 or not np.isfinite(value):
        raise DomainError(f"{name} must lie in (0, 1), got {value}")
    return value


def check_positive(value, name):
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return value


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def as_1d(values, name="values"):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr
