"""
Error types and input validation utilities.
"""
import math
import numbers


class LabError(Exception):
    """Base class for every error the lab reports to the command line."""
    exit_code = 1


class ValidationError(LabError):
    exit_code = 2


class FormatError(ValidationError):
    """Malformed coefficient or config file."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class ResourceError(LabError):
    exit_code = 3


class DimensionError(ResourceError):
    """Input table too short for the requested construction."""


class RangeError(ResourceError):
    """Query point beyond the support of a table."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class NumericError(LabError):
    exit_code = 4


def validate_positive_int(name, value):
    """
    Validate that a value is a positive integer.

    Args:
        name: Parameter name used in the message
        value: Value to check

    Returns:
        int: The value as a Python int
    """
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f'{name} must be an integer, got {value!r}')
    if value < 1:
        raise ValidationError(f'{name} must be positive, got {value}')
    return int(value)


def validate_positive_real(name, value):
    """
    Validate that a value is a finite positive real number.
    """
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f'{name} must be a real number, got {value!r}')
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f'{name} must be positive and finite, got {value}')
    return value


def validate_alpha(alpha):
    """
    Validate the truncation exponent of the Voronoi expansion.

    Args:
        alpha: Exponent, must lie strictly inside (1/2, 2/3)

    Returns:
        float: The validated exponent
    """
    alpha = float(alpha)
    if not (0.5 < alpha < 2.0 / 3.0):
        raise ValidationError(f'alpha must lie strictly inside (1/2, 2/3), got {alpha}')
    return alpha


def validate_choice(name, value, allowed):
    if value not in allowed:
        raise ValidationError(
            f'{name} must be one of {", ".join(sorted(allowed))}, got {value!r}')
    return value


def check_memory_budget(what, n_bytes, budget):
    """
    Refuse allocations larger than the configured memory budget.

    Args:
        what: Description of the allocation
        n_bytes: Requested size in bytes
        budget: Allowed size in bytes
    """
    if n_bytes > budget:
        raise ResourceError(
            f'{what} needs {n_bytes} bytes, memory budget is {budget} bytes')
