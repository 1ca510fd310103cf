"""
Summatory error terms Delta(x), the normalized F(t) and the mean square.
"""
import logging
import math

import numpy as np
from numba import njit

from gl3lab.models import ErrorTermSeries, MeanSquareResult, SeriesConstant
from gl3lab.utils.summation import compensated_cumsum, compensated_sum
from gl3lab.utils.validators import DomainError, RangeError, validate_positive_int

logger = logging.getLogger(__name__)

# Laurent data of zeta at s = 1: zeta(s) = 1/(s-1) + EULER_GAMMA - STIELTJES_GAMMA1 (s-1) + ...
EULER_GAMMA = 0.57721566490153286061
STIELTJES_GAMMA1 = -0.07281584548367672486

# Res_{s=1} zeta(s)^3 x^s / s = x (D3_C2 log^2 x + D3_C1 log x + D3_C0),
# regenerated by derive_main_term_d3()
D3_C2 = 0.5
D3_C1 = 3.0 * EULER_GAMMA - 1.0
D3_C0 = 1.0 - 3.0 * EULER_GAMMA + 3.0 * EULER_GAMMA ** 2 - 3.0 * STIELTJES_GAMMA1

GAUSS_NODES = 8
MEAN_SQUARE_SCALE = 1.0 / (10.0 * math.pi ** 2)


def main_term_d3_coefficients():
    """Coefficients (c2, c1, c0) of the d3 residue main term."""
    return D3_C2, D3_C1, D3_C0


def derive_main_term_d3(dps=30):
    """
    Recompute the d3 main-term coefficients symbolically.

    Expands zeta(s)^3 x^s / s around s = 1 with sympy, keeping the Stieltjes
    constants symbolic, then evaluates them with mpmath.

    Args:
        dps: Decimal digits for the numeric evaluation

    Returns:
        tuple: (c2, c1, c0) as floats
    """
    import mpmath
    import sympy

    w, L, g0, g1 = sympy.symbols('w L gamma0 gamma1')
    zeta_times_w = 1 + g0 * w - g1 * w ** 2
    # Res = coefficient of w^2 in w^3 zeta^3 x^(1+w)/(1+w), divided by x
    regular = zeta_times_w ** 3 * sympy.exp(w * L) / (1 + w)
    coefficient = sympy.expand(sympy.series(regular, w, 0, 3).removeO()).coeff(w, 2)
    c2, c1, c0 = sympy.Poly(coefficient, L).all_coeffs()

    mpmath.mp.dps = dps
    constants = {g0: sympy.Float(str(mpmath.euler), dps), g1: sympy.Float(str(mpmath.stieltjes(1)), dps)}
    return tuple(float(sympy.N(c.subs(constants), dps)) for c in (c2, c1, c0))


def build_series(table):
    """
    Prefix sums of a coefficient table.

    Args:
        table: Sealed CoefficientTable

    Returns:
        ErrorTermSeries
    """
    if table.exact_values is not None:
        prefix = np.cumsum(table.exact_values).astype(np.float64)
    else:
        prefix = compensated_cumsum(table.values)
    return ErrorTermSeries(table=table, prefix=prefix, main_term=table.main_term)


def _check_range(series, x, minimum=0.0):
    x_arr = np.asarray(x, dtype=np.float64)
    if x_arr.size == 0:
        return x_arr
    if np.any(~np.isfinite(x_arr)) or np.any(x_arr <= minimum):
        raise DomainError(f'query point must exceed {minimum}, got {np.min(x_arr)}')
    largest = float(np.max(x_arr))
    if largest > series.length:
        raise RangeError(
            f'query point {largest} beyond table length {series.length}',
            required=int(math.floor(largest)))
    return x_arr


def delta_at(series, x):
    """
    Delta(x) = sum_{n<=x} a(n) minus the main term when the table has a pole.

    Args:
        series: ErrorTermSeries
        x: Query point or array of points in (0, N]

    Returns:
        float or ndarray
    """
    x_arr = _check_range(series, x)
    value = series.prefix[np.floor(x_arr).astype(np.int64)]
    if series.has_pole:
        value = value - series.main_term(x_arr)
    if np.ndim(x) == 0:
        return float(value)
    return value


def normalized_F(series, t):
    """F(t) = t^(-1/3) Delta(t) for 1 <= t <= N."""
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 1.0):
        raise DomainError(f'F(t) is defined for t >= 1, got {np.min(t_arr)}')
    value = delta_at(series, t_arr) / np.cbrt(t_arr)
    if np.ndim(t) == 0:
        return float(value)
    return value


@njit(cache=True)
def _pole_cumulative(prefix, upto, c2, c1, c0, nodes, weights):
    """cum[k] = integral over [0, k] of (prefix[floor y] - main(y))^2."""
    cum = np.zeros(upto + 1, dtype=np.float64)
    total = 0.0
    correction = 0.0
    for k in range(upto):
        piece = 0.0
        for j in range(nodes.shape[0]):
            y = k + nodes[j]
            log_y = math.log(y)
            diff = prefix[k] - y * ((c2 * log_y + c1) * log_y + c0)
            piece += weights[j] * diff * diff
        t = total + piece
        if abs(total) >= abs(piece):
            correction += (total - t) + piece
        else:
            correction += (piece - t) + total
        total = t
        cum[k + 1] = total + correction
    return cum


@njit(cache=True)
def _pole_piece(prefix_k, a, b, c2, c1, c0, nodes, weights):
    piece = 0.0
    length = b - a
    for j in range(nodes.shape[0]):
        y = a + length * nodes[j]
        log_y = math.log(y)
        diff = prefix_k - y * ((c2 * log_y + c1) * log_y + c0)
        piece += weights[j] * diff * diff
    return piece * length


def _gauss_legendre_unit(count=GAUSS_NODES):
    nodes, weights = np.polynomial.legendre.leggauss(count)
    return (nodes + 1.0) / 2.0, weights / 2.0


def _cumulative_square_integral(series, upto):
    if series.has_pole:
        nodes, weights = _gauss_legendre_unit()
        mt = series.main_term
        return _pole_cumulative(series.prefix, upto, mt.c2, mt.c1, mt.c0, nodes, weights)
    squares = np.zeros(upto + 1, dtype=np.float64)
    # piece [k, k+1) contributes prefix[k]^2
    squares[1:] = series.prefix[:upto] ** 2
    return compensated_cumsum(squares)


def _square_integral_at(series, cumulative, x):
    k = int(math.floor(x))
    if x == k:
        return float(cumulative[k])
    if series.has_pole:
        nodes, weights = _gauss_legendre_unit()
        mt = series.main_term
        tail = _pole_piece(series.prefix[k], float(k), float(x), mt.c2, mt.c1, mt.c0, nodes, weights)
    else:
        tail = series.prefix[k] ** 2 * (x - k)
    return float(cumulative[k] + tail)


def series_constant(table, cutoff):
    """
    C = sum_{n<=cutoff} a(n)^2 / n^(4/3) with a Rankin-Selberg tail bound.

    Args:
        table: CoefficientTable
        cutoff: Number of terms, at most N

    Returns:
        SeriesConstant
    """
    cutoff = validate_positive_int('cutoff', cutoff)
    if cutoff > table.length:
        raise RangeError(f'cutoff {cutoff} beyond table length {table.length}', required=cutoff)
    n = np.arange(1, cutoff + 1, dtype=np.float64)
    terms = table.values[1:cutoff + 1] ** 2 / n ** (4.0 / 3.0)
    value = compensated_sum(terms)
    tail_bound = 3.0 * table.rankin_selberg_constant * cutoff ** (-1.0 / 3.0)
    return SeriesConstant(value=float(value), cutoff=cutoff, tail_bound=float(tail_bound))


def mean_square_profile(series, xs):
    """
    Mean-square integral, prediction and ratio at several points.

    The prediction is (1/(10 pi^2)) C x^(5/3) with C summed over the whole
    table. For tables with a pole the same shape is used as an analogue.

    Args:
        series: ErrorTermSeries
        xs: Increasing points in (0, N]

    Returns:
        list: MeanSquareResult per point
    """
    xs = [float(x) for x in xs]
    if not xs:
        return []
    _check_range(series, xs)
    upto = int(math.floor(max(xs)))
    cumulative = _cumulative_square_integral(series, upto)
    constant = series_constant(series.table, series.length).value
    results = []
    for x in xs:
        integral = _square_integral_at(series, cumulative, x)
        predicted = MEAN_SQUARE_SCALE * constant * x ** (5.0 / 3.0)
        ratio = integral / predicted if predicted > 0 else float('nan')
        results.append(MeanSquareResult(x=x, integral=integral, predicted=predicted, ratio=ratio))
    logger.debug(f'Mean square at {len(xs)} points, last ratio {results[-1].ratio}')
    return results


def mean_square_integral(series, x):
    """
    Integral of Delta(y)^2 over [0, x] with its predicted size.

    Returns:
        MeanSquareResult: unpacks as (integral, predicted, ratio)
    """
    return mean_square_profile(series, [x])[0]


def main_term_residuals(series, xs):
    """Delta(x)/x at the given points, the check that the main term is right."""
    xs = np.asarray(xs, dtype=np.float64)
    return delta_at(series, xs) / xs
