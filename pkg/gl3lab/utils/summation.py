"""
Compensated summation kernels.

Neumaier's variant of Kahan summation: the running correction also
captures the case where the incoming term is larger than the sum.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def compensated_sum(values):
    total = 0.0
    correction = 0.0
    for i in range(values.shape[0]):
        x = values[i]
        t = total + x
        if abs(total) >= abs(x):
            correction += (total - t) + x
        else:
            correction += (x - t) + total
        total = t
    return total + correction


@njit(cache=True)
def compensated_cumsum(values):
    """
    Prefix sums with prefix[0] = 0 and prefix[k] = values[1] + ... + values[k].

    Args:
        values: float64 array indexed 0..N, entry 0 ignored

    Returns:
        ndarray: float64 array indexed 0..N
    """
    n = values.shape[0]
    prefix = np.zeros(n, dtype=np.float64)
    total = 0.0
    correction = 0.0
    for k in range(1, n):
        x = values[k]
        t = total + x
        if abs(total) >= abs(x):
            correction += (total - t) + x
        else:
            correction += (x - t) + total
        total = t
        prefix[k] = total + correction
    return prefix


@njit(cache=True)
def compensated_cumsum_squares(values):
    """Running sums of values[k]**2, same indexing as compensated_cumsum."""
    n = values.shape[0]
    out = np.zeros(n, dtype=np.float64)
    total = 0.0
    correction = 0.0
    for k in range(1, n):
        x = values[k] * values[k]
        t = total + x
        if total >= x:
            correction += (total - t) + x
        else:
            correction += (x - t) + total
        total = t
        out[k] = total + correction
    return out
