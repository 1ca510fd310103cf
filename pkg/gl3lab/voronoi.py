"""
Truncated Voronoi expansions of Delta(x) and F(t), and the period-1 blocks a_n(t).
"""
import logging
import math

import numpy as np

from gl3lab import current_lab
from gl3lab.error_term import normalized_F
from gl3lab.models import Precision, VoronoiConfig
from gl3lab.utils.number_theory import cubefree_kernels, integer_cube_root, is_cubefree
from gl3lab.utils.validators import DomainError, RangeError, validate_positive_int

logger = logging.getLogger(__name__)

VORONOI_SCALE = 1.0 / (math.pi * math.sqrt(3.0))
TWO_PI = 2.0 * math.pi
_CHUNK_ELEMENTS = 2_000_000


def _use_extended(cfg, largest):
    if cfg is not None and cfg.argument_precision is Precision.EXTENDED:
        return True
    return largest > current_lab().config['EXTENDED_PRECISION_ABOVE']


def cube_root_fraction(n, x, extended=False):
    """
    Fractional part of (n x)^(1/3), elementwise.

    With extended=True the product and the cube root are taken in long double
    before the split, so the fraction keeps full double accuracy for large nx.
    """
    if extended:
        y = np.cbrt(np.asarray(n, dtype=np.longdouble) * np.asarray(x, dtype=np.longdouble))
        return (y - np.floor(y)).astype(np.float64)
    y = np.cbrt(np.asarray(n, dtype=np.float64) * np.asarray(x, dtype=np.float64))
    return y - np.floor(y)


def _three_cube_root_fraction(n, x, extended):
    """Fractional part of 3 (n x)^(1/3); cos(6 pi (nx)^(1/3)) = cos(2 pi of it)."""
    if extended:
        y = 3 * np.cbrt(np.asarray(n, dtype=np.longdouble) * np.asarray(x, dtype=np.longdouble))
        return (y - np.floor(y)).astype(np.float64)
    y = 3.0 * np.cbrt(np.asarray(n, dtype=np.float64) * np.asarray(x, dtype=np.float64))
    return y - np.floor(y)


def truncation_length(x, alpha):
    """X = x^(3 alpha - 1) / (8 pi^3), the number of terms kept."""
    return x ** (3.0 * alpha - 1.0) / (8.0 * math.pi ** 3)


def truncated_voronoi(table, x, cfg=None):
    """
    Single-truncation Voronoi sum approximating Delta(x).

    Args:
        table: CoefficientTable
        x: Positive non-integer point
        cfg: VoronoiConfig (alpha and precision)

    Returns:
        float: (x^(1/3)/(pi sqrt 3)) sum_{n<=X} a(n) n^(-2/3) cos(6 pi (nx)^(1/3))
    """
    cfg = cfg or VoronoiConfig()
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f'x must be positive, got {x}')
    if x == math.floor(x):
        raise DomainError(f'x must not be an integer, got {x}')
    n_max = int(math.floor(truncation_length(x, cfg.alpha)))
    if n_max > table.length:
        raise RangeError(
            f'Voronoi truncation at x={x} needs a table of length {n_max}, got {table.length}',
            required=n_max)
    if n_max < 1:
        return 0.0

    n = np.arange(1, n_max + 1, dtype=np.int64)
    weights = table.values[1:n_max + 1] / n.astype(np.float64) ** (2.0 / 3.0)
    phases = np.cos(TWO_PI * _three_cube_root_fraction(n, x, _use_extended(cfg, x)))
    return float(VORONOI_SCALE * x ** (1.0 / 3.0) * np.sum(weights * phases))


def truncated_voronoi_many(table, xs, cfg=None):
    """truncated_voronoi over an array of points, evaluated in chunks."""
    cfg = cfg or VoronoiConfig()
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size == 0:
        return np.zeros(0)
    if np.any(xs <= 0):
        raise DomainError(f'x must be positive, got {xs.min()}')
    limits = np.floor(truncation_length(xs, cfg.alpha)).astype(np.int64)
    n_max = int(limits.max())
    if n_max > table.length:
        worst = float(xs[np.argmax(limits)])
        raise RangeError(
            f'Voronoi truncation at x={worst} needs a table of length {n_max}, got {table.length}',
            required=n_max)
    out = np.zeros(xs.shape[0], dtype=np.float64)
    if n_max < 1:
        return out

    extended = _use_extended(cfg, float(xs.max()))
    n = np.arange(1, n_max + 1, dtype=np.int64)
    weights = table.values[1:n_max + 1] / n.astype(np.float64) ** (2.0 / 3.0)
    step = max(1, _CHUNK_ELEMENTS // n_max)
    for start in range(0, xs.shape[0], step):
        chunk = xs[start:start + step]
        phases = np.cos(TWO_PI * _three_cube_root_fraction(n[None, :], chunk[:, None], extended))
        phases[n[None, :] > limits[start:start + step, None]] = 0.0
        out[start:start + step] = phases @ weights
    return VORONOI_SCALE * np.cbrt(xs) * out


def voronoi_F(table, t, cfg=None):
    """F(t) = t^(-1/3) times the truncated Voronoi sum, for arrays of t."""
    t = np.asarray(t, dtype=np.float64)
    return truncated_voronoi_many(table, t, cfg) / np.cbrt(t)


def _kernel_weights(table, n, rmax):
    r = np.arange(1, rmax + 1, dtype=np.int64)
    m = n * r ** 3
    return r, VORONOI_SCALE * table.values[m] / m.astype(np.float64) ** (2.0 / 3.0)


def a_n_eval(table, n, t, rmax):
    """
    Period-1 block a_n(t) = (1/(pi sqrt 3)) sum_{r<=rmax} a(n r^3) (n r^3)^(-2/3) cos(6 pi r t).

    Args:
        table: CoefficientTable
        n: Cube-free kernel
        t: Point or array of points
        rmax: Number of harmonics

    Returns:
        float or ndarray
    """
    n = validate_positive_int('n', n)
    rmax = validate_positive_int('rmax', rmax)
    if not is_cubefree(n):
        raise DomainError(f'a_n is defined for cube-free n only, got {n}')
    if n * rmax ** 3 > table.length:
        raise RangeError(
            f'a_{n} with rmax={rmax} needs a table of length {n * rmax ** 3}, got {table.length}',
            required=n * rmax ** 3)
    r, weights = _kernel_weights(table, n, rmax)
    t_arr = np.asarray(t, dtype=np.float64)
    frac = t_arr - np.floor(t_arr)
    value = np.cos(6.0 * math.pi * np.multiply.outer(frac, r)) @ weights
    if np.ndim(t) == 0:
        return float(value)
    return value


def truncated_F_N(table, t, N_trunc, cfg=None):
    """
    Double truncation F_N(t) over cube-free n <= N_trunc and r <= N_trunc.

    Args:
        table: CoefficientTable with length at least N_trunc^4
        t: Point or array of points
        N_trunc: Truncation parameter

    Returns:
        float or ndarray
    """
    N_trunc = validate_positive_int('N_trunc', N_trunc)
    if N_trunc ** 4 > table.length:
        raise RangeError(
            f'F_N with N={N_trunc} needs a table of length {N_trunc ** 4}, got {table.length}',
            required=N_trunc ** 4)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr <= 0):
        raise DomainError(f't must be positive, got {t_arr.min()}')
    extended = _use_extended(cfg, float(t_arr.max()) * N_trunc)

    r = np.arange(1, N_trunc + 1, dtype=np.int64)
    total = np.zeros(t_arr.shape, dtype=np.float64)
    for n in range(1, N_trunc + 1):
        if not is_cubefree(n):
            continue
        m = n * r ** 3
        weights = VORONOI_SCALE * table.values[m] / m.astype(np.float64) ** (2.0 / 3.0)
        # same reduction as a_n(gamma_n t^(1/3)): split (nt)^(1/3) first
        frac = cube_root_fraction(n, t_arr, extended)
        total = total + np.cos(6.0 * math.pi * np.multiply.outer(frac, r)) @ weights
    if np.ndim(t) == 0:
        return float(total)
    return total


def lemma51_profile(table, n_max=200, grid=10_000, trapezoid_points=2048, tail_from=1000):
    """
    Numerical hypotheses on the blocks a_n: mean zero, sup-norm decay,
    square integrability and the growth of n^(7/5) times the square integral.

    Args:
        table: CoefficientTable
        n_max: Largest kernel for the mean and sup-norm checks
        grid: Points of the sup-norm grid on [0, 1)
        trapezoid_points: Points of the periodic trapezoid rule for the mean
        tail_from: Kernel beyond which square-integral increments are reported

    Returns:
        dict
    """
    N = table.length
    kernels, means, sups = [], [], []
    t_mean = np.arange(trapezoid_points, dtype=np.float64) / trapezoid_points
    t_grid = np.arange(grid, dtype=np.float64) / grid
    for n in range(1, min(n_max, N) + 1):
        if not is_cubefree(n):
            continue
        rmax = integer_cube_root(N // n)
        r, weights = _kernel_weights(table, n, rmax)
        kernels.append(n)
        means.append(float(np.mean(np.cos(6.0 * math.pi * np.multiply.outer(t_mean, r)) @ weights)))
        sups.append(float(np.max(np.abs(np.cos(6.0 * math.pi * np.multiply.outer(t_grid, r)) @ weights))))

    kernels = np.asarray(kernels, dtype=np.int64)
    sups = np.asarray(sups)
    fitted = float(np.max(sups * kernels.astype(np.float64) ** 0.4)) if kernels.size else 0.0

    # integral of a_n^2 over [0,1] for every kernel at once
    kernel_of, _ = cubefree_kernels(N)
    m = np.arange(1, N + 1, dtype=np.float64)
    contributions = table.values[1:] ** 2 / m ** (4.0 / 3.0) / (6.0 * math.pi ** 2)
    square_integrals = np.bincount(kernel_of[1:], weights=contributions, minlength=N + 1)
    all_kernels = np.flatnonzero(square_integrals > 0)
    partial = np.cumsum(square_integrals[all_kernels])
    beyond = square_integrals[all_kernels[all_kernels > tail_from]]
    growth = all_kernels.astype(np.float64) ** 1.4 * square_integrals[all_kernels]

    return {
        'kernels': kernels.tolist(),
        'means': means,
        'max_abs_mean': float(np.max(np.abs(means))) if means else 0.0,
        'sups': sups.tolist(),
        'sup_constant': fitted,
        'square_integral_total': float(partial[-1]) if partial.size else 0.0,
        'max_increment_beyond': float(beyond.max()) if beyond.size else 0.0,
        'tail_from': tail_from,
        'weighted_growth_last': float(growth[-1]) if growth.size else 0.0,
        'weighted_growth_first': float(growth[0]) if growth.size else 0.0,
    }


def truncation_defect(series, table, T, N_trunc, count=1000, cfg=None):
    """
    Window means of |F - F_N| and min{1, |F - F_N|} over a grid on [T, 2T].

    Args:
        series: ErrorTermSeries with length at least 2T
        table: CoefficientTable for F_N
        T: Window start
        N_trunc: Truncation parameter
        count: Grid size

    Returns:
        dict: both means and whether N_trunc <= T^(1/162) holds
    """
    T = float(T)
    t = T * (1.0 + (np.arange(1, count + 1) - 0.5) / count)
    exact = normalized_F(series, t)
    approx = truncated_F_N(table, t, N_trunc, cfg)
    diff = np.abs(exact - approx)
    in_range = N_trunc <= T ** (1.0 / 162.0)
    if not in_range:
        logger.info(f'N={N_trunc} exceeds T^(1/162) at T={T}; reporting outside the proven range')
    return {
        'T': T,
        'N_trunc': N_trunc,
        'mean_abs': float(np.mean(diff)),
        'mean_min1': float(np.mean(np.minimum(1.0, diff))),
        'hypothesis_range_ok': bool(in_range),
    }


def grid_comparison(series, table, t, N_trunc, cfg=None):
    """
    Rows (t, F_exact, F_voronoi, F_N) for the batch CSV.

    F_exact is NaN where t lies beyond the table.
    """
    t = np.asarray(t, dtype=np.float64)
    exact = np.full(t.shape, np.nan)
    inside = t <= series.length
    if np.any(inside):
        exact[inside] = normalized_F(series, t[inside])
    voronoi = voronoi_F(table, t, cfg)
    truncated = truncated_F_N(table, t, N_trunc, cfg)
    return np.column_stack((t, exact, voronoi, truncated))
