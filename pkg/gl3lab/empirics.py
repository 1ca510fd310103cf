"""
Empirical distributions of F(t) over windows [T, 2T] and their comparison
with the random model.
"""
import logging
import math

import numpy as np
from scipy import integrate, stats

from gl3lab import current_lab
from gl3lab.error_term import normalized_F
from gl3lab.models import BoundCurves, EmpiricalDistribution
from gl3lab.utils.rng import WINDOW_STREAM, as_key, keyed_uniforms
from gl3lab.utils.validators import DomainError, RangeError, validate_choice, validate_positive_int
from gl3lab.voronoi import voronoi_F

logger = logging.getLogger(__name__)

STRATEGIES = {'grid', 'uniform'}
_DENSITY_CHUNK = 4_000_000


def window_points(T, count, strategy='grid', seed=None):
    """
    Sample points on [T, 2T].

    Args:
        T: Window start
        count: Number of points
        strategy: 'grid' for T(1 + (j - 1/2)/count), 'uniform' for seeded i.i.d. points
        seed: Required for the uniform strategy

    Returns:
        ndarray
    """
    count = validate_positive_int('count', count)
    validate_choice('strategy', strategy, STRATEGIES)
    T = float(T)
    if strategy == 'grid':
        return T * (1.0 + (np.arange(1, count + 1) - 0.5) / count)
    if seed is None:
        raise DomainError('uniform window sampling needs a seed')
    return T * (1.0 + keyed_uniforms(as_key(seed), 0, count, as_key(WINDOW_STREAM)))


def empirical_distribution(evaluator, T, count, strategy='grid', seed=None):
    """
    Distribution of evaluator(t) for t sampled on [T, 2T].

    Args:
        evaluator: Vectorized function of t
        T: Window start
        count: Number of sample points
        strategy: 'grid' or 'uniform'
        seed: Seed for the uniform strategy

    Returns:
        EmpiricalDistribution
    """
    t = window_points(T, count, strategy, seed)
    try:
        values = np.asarray(evaluator(t), dtype=np.float64)
    except RangeError as e:
        raise RangeError(f'{e} (window [{T}, {2 * T}], largest t={t.max()})', required=e.required)
    if values.shape == ():
        values = np.full(t.shape, float(values))
    return EmpiricalDistribution(samples=values, window=(float(T), 2.0 * float(T)))


def window_evaluator(series, table, cfg=None):
    """
    F(t) from exact prefix sums inside the table, the Voronoi truncation beyond it.
    """
    def evaluate(t):
        t = np.asarray(t, dtype=np.float64)
        if t.size == 0 or t.max() <= series.length:
            return normalized_F(series, t)
        logger.info(f'Window reaches t={t.max():.1f} beyond table length {series.length}; '
                    f'using the Voronoi truncation')
        return voronoi_F(table, t, cfg)
    return evaluate


def _cdf_steps(dist, points, side):
    cumulative = np.concatenate(([0.0], np.cumsum(dist.probabilities())))
    return np.minimum(cumulative[np.searchsorted(dist.samples, points, side=side)], 1.0)


def ks_distance(a, b):
    """
    Exact sup |CDF_a - CDF_b|, checking both one-sided limits at every jump.

    Args:
        a, b: EmpiricalDistribution

    Returns:
        float
    """
    if a.size == 0 or b.size == 0:
        raise DomainError('KS distance needs two nonempty distributions')
    jumps = np.union1d(a.samples, b.samples)
    right = np.abs(_cdf_steps(a, jumps, 'right') - _cdf_steps(b, jumps, 'right'))
    left = np.abs(_cdf_steps(a, jumps, 'left') - _cdf_steps(b, jumps, 'left'))
    return float(max(right.max(), left.max()))


def density_estimate(dist, bandwidth, grid):
    """
    Gaussian kernel density on a grid.

    Args:
        dist: EmpiricalDistribution
        bandwidth: Kernel width
        grid: Evaluation points

    Returns:
        list: (alpha, g(alpha)) pairs
    """
    if bandwidth <= 0:
        raise DomainError(f'bandwidth must be positive, got {bandwidth}')
    grid = np.asarray(grid, dtype=np.float64)
    weights = dist.probabilities()
    density = np.zeros(grid.shape[0], dtype=np.float64)
    step = max(1, _DENSITY_CHUNK // max(1, grid.shape[0]))
    for start in range(0, dist.size, step):
        samples = dist.samples[start:start + step]
        z = (grid[:, None] - samples[None, :]) / bandwidth
        density += stats.norm.pdf(z) @ weights[start:start + step]
    density /= bandwidth
    if grid.shape[0] > 1:
        mass = float(integrate.trapezoid(density, grid))
        if abs(mass - 1.0) > 1e-3:
            logger.warning(f'Density grid [{grid[0]}, {grid[-1]}] holds mass {mass:.6f}')
    return list(zip(grid.tolist(), density.tolist()))


def silverman_bandwidth(dist):
    """Silverman's rule of thumb for the Gaussian kernel."""
    spread = dist.std()
    q75, q25 = dist.quantile(0.75), dist.quantile(0.25)
    robust = min(spread, (q75 - q25) / 1.34) if q75 > q25 else spread
    return 0.9 * robust * dist.size ** (-0.2)


def tail_probability(dist, V, side='above'):
    """
    Weighted fraction strictly above V, or strictly below -V for side='below'.
    """
    validate_choice('side', side, {'above', 'below'})
    p = dist.probabilities()
    if side == 'above':
        return float(np.sum(p[dist.samples > V]))
    return float(np.sum(p[dist.samples < -V]))


def wilson_interval(successes, n, z=1.96):
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise DomainError('Wilson interval needs n > 0')
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return centre - half, centre + half


def discrepancy_rate(T):
    """(log log log T)^(5/3) / (log log T)^(1/3)."""
    T = float(T)
    if T < 16:
        raise DomainError(f'iterated logarithms need T >= 16, got {T}')
    ll = math.log(math.log(T))
    return math.log(ll) ** (5.0 / 3.0) / ll ** (1.0 / 3.0)


def bound_curves(T, V_grid, eps1, eps2, constants=None):
    """
    Discrepancy rate at T, the admissible V range and the tail envelope.

    Envelope: exp(-b3 V^(35/2 + eps1)) <= P(F > V) <= exp(-b4 V^(5/3 - eps2))
    for b1 <= V <= b2 (log log T)^(1/21) (log log log T)^(-5/21).

    Returns:
        BoundCurves
    """
    T = float(T)
    if T < 16:
        raise DomainError(f'iterated logarithms need T >= 16, got {T}')
    merged = dict(current_lab().config['TAIL_CONSTANTS'])
    merged.update(constants or {})
    constants = merged
    ll = math.log(math.log(T))
    lll = math.log(ll)
    V = np.asarray(V_grid, dtype=np.float64)
    return BoundCurves(
        T=T,
        rate=discrepancy_rate(T),
        v_low=constants['b1'],
        v_high=constants['b2'] * ll ** (1.0 / 21.0) * lll ** (-5.0 / 21.0),
        V_grid=V,
        lower=np.exp(-constants['b3'] * V ** (35.0 / 2.0 + eps1)),
        upper=np.exp(-constants['b4'] * V ** (5.0 / 3.0 - eps2)),
        constants=constants,
    )


def empirical_characteristic_function(dist):
    """alpha -> sum_j w_j exp(i alpha x_j), vectorized over alpha."""
    p = dist.probabilities()
    samples = dist.samples

    def phi(alpha):
        alpha = np.asarray(alpha, dtype=np.float64)
        values = np.exp(1j * np.multiply.outer(alpha, samples)) @ p
        return complex(values) if values.ndim == 0 else values
    return phi


def _as_vector(charfn, alphas):
    values = charfn(alphas)
    if np.ndim(values) == 0:
        return np.array([charfn(a) for a in alphas], dtype=np.complex128)
    return np.asarray(values, dtype=np.complex128)


def berry_esseen_bound(charfn_F, charfn_X, R, quad_points):
    """
    1/R + integral over [-R, R] of |(phi_F - phi_X)(alpha) / alpha|.

    On |alpha| < R/quad_points the integrand is replaced by |d/dalpha (phi_F - phi_X)(0)|,
    estimated by a central difference at the window edge.

    Args:
        charfn_F, charfn_X: Characteristic functions
        R: Cutoff
        quad_points: Trapezoid points on each half-line

    Returns:
        float
    """
    R = float(R)
    if R <= 0:
        raise DomainError(f'R must be positive, got {R}')
    quad_points = validate_positive_int('quad_points', quad_points)
    h = R / quad_points
    positive = np.linspace(h, R, quad_points)
    alphas = np.concatenate((-positive[::-1], positive))
    diff = _as_vector(charfn_F, alphas) - _as_vector(charfn_X, alphas)
    integrand = np.abs(diff) / np.abs(alphas)
    negative_part = integrate.trapezoid(integrand[:quad_points], alphas[:quad_points]) if quad_points > 1 else 0.0
    positive_part = integrate.trapezoid(integrand[quad_points:], alphas[quad_points:]) if quad_points > 1 else 0.0
    slope = abs(diff[quad_points] - diff[quad_points - 1]) / (2.0 * h)
    return float(1.0 / R + negative_part + positive_part + 2.0 * h * slope)


def cdf_table(a, b, points):
    """Rows (u, cdf_a(u), cdf_b(u)) for the CSV emission."""
    points = np.asarray(points, dtype=np.float64)
    return np.column_stack((points, a.cdf(points), b.cdf(points)))
