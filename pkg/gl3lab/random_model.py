"""
The random trigonometric model: one uniform phase per cube-free kernel,
shared across all harmonics r.

Sampling uses counter-based uniforms keyed by (seed, draw, kernel), so a
batch is reproducible regardless of thread count or evaluation order.
"""
import logging
import math

import numpy as np
from numba import njit, prange
from scipy.special import logsumexp

from gl3lab import current_lab
from gl3lab.models import SampleBatch, TruncatedModel
from gl3lab.utils.number_theory import cubefree_kernels, integer_cube_root
from gl3lab.utils.rng import as_key, keyed_uniform
from gl3lab.utils.summation import compensated_sum
from gl3lab.utils.validators import DomainError, NumericError, RangeError, validate_positive_int

logger = logging.getLogger(__name__)

VORONOI_SCALE = 1.0 / (math.pi * math.sqrt(3.0))
# exp overflows float64 beyond this argument
_EXP_LIMIT = 709.0


def build_model(table, N_model, R_model=None):
    """
    Truncated model with kernels n <= N_model and harmonics r <= R_model.

    Args:
        table: CoefficientTable
        N_model: Kernel bound
        R_model: Harmonic bound, defaults to floor((N / N_model)^(1/3))

    Returns:
        TruncatedModel
    """
    N_model = validate_positive_int('N_model', N_model)
    if R_model is None:
        R_model = integer_cube_root(table.length // N_model)
        if R_model < 1:
            raise RangeError(
                f'model with N_model={N_model} needs a table of length {N_model}, got {table.length}',
                required=N_model)
    R_model = validate_positive_int('R_model', R_model)
    required = N_model * R_model ** 3
    if required > table.length:
        raise RangeError(
            f'model N_model={N_model}, R_model={R_model} needs a table of length {required}, '
            f'got {table.length}', required=required)

    kernel_of, _ = cubefree_kernels(N_model)
    kernels = np.flatnonzero(kernel_of == np.arange(N_model + 1))
    kernels = kernels[kernels >= 1].astype(np.int64)

    r = np.arange(1, R_model + 1, dtype=np.int64)
    m = kernels[:, None] * r[None, :] ** 3
    weights = VORONOI_SCALE * table.values[m] / (
        kernels[:, None].astype(np.float64) ** (2.0 / 3.0) * r[None, :].astype(np.float64) ** 2)

    logger.debug(f'Model with {kernels.size} kernels and {R_model} harmonics')
    return TruncatedModel(
        kernels=kernels,
        weights=weights,
        N_model=N_model,
        R_model=R_model,
        source={'provider': table.provider.value, 'length': table.length},
    )


@njit(parallel=True, cache=True)
def _sample_draws(kernels, weights, seed, start, count):
    out = np.empty(count, dtype=np.float64)
    n_kernels = weights.shape[0]
    n_harmonics = weights.shape[1]
    for i in prange(count):
        draw = np.uint64(start + i)
        total = 0.0
        for j in range(n_kernels):
            u = keyed_uniform(seed, draw, np.uint64(kernels[j]))
            c1 = math.cos(6.0 * math.pi * u)
            # cos(r theta) by the Chebyshev recurrence
            prev = 1.0
            cur = c1
            block = weights[j, 0] * cur
            for r in range(1, n_harmonics):
                nxt = 2.0 * c1 * cur - prev
                prev = cur
                cur = nxt
                block += weights[j, r] * cur
            total += block
        out[i] = total
    return out


def sample_batch(model, seed, count):
    """
    Independent draws of the model.

    Args:
        model: TruncatedModel
        seed: Integer seed
        count: Number of draws

    Returns:
        SampleBatch
    """
    count = validate_positive_int('count', count)
    if model.size == 0:
        values = np.zeros(count, dtype=np.float64)
    else:
        values = _sample_draws(model.kernels, model.weights, as_key(seed), 0, count)
    return SampleBatch(values=values, seed=int(seed), count=count)


def exact_second_moment(model):
    """E F^2 = (1/2) sum w(n,r)^2, by orthogonality of cos(6 pi r X)."""
    if model.size == 0:
        return 0.0
    return 0.5 * compensated_sum((model.weights ** 2).ravel())


def _draws(model, seed, draws, batch):
    if batch is not None:
        return batch.values
    return sample_batch(model, seed, draws).values


def _jackknife_mean(samples):
    """Mean and delete-one jackknife standard error."""
    n = samples.shape[0]
    estimate = float(np.mean(samples))
    if n < 2:
        return estimate, float('nan')
    leave_one_out = (np.sum(samples) - samples) / (n - 1)
    spread = np.sum((leave_one_out - np.mean(leave_one_out)) ** 2)
    return estimate, float(math.sqrt((n - 1) / n * spread))


def laplace_transform(model, lam, seed, draws, batch=None):
    """
    Monte Carlo estimate of E exp(lambda F).

    Args:
        model: TruncatedModel
        lam: Real lambda, |lambda| at most the configured guard
        seed: Integer seed
        draws: Number of draws
        batch: Optional precomputed SampleBatch reused across lambdas

    Returns:
        tuple: (estimate, stderr)
    """
    lam = float(lam)
    limit = current_lab().config['LAPLACE_MAX_ABS_LAMBDA']
    if abs(lam) > limit:
        raise DomainError(f'|lambda| must not exceed {limit}, got {lam}')
    values = _draws(model, seed, draws, batch)
    exponents = lam * values
    if exponents.size and np.max(exponents) > _EXP_LIMIT:
        raise NumericError(
            f'exp overflow at lambda={lam}: max |F| sample is {np.max(np.abs(values))}')
    return _jackknife_mean(np.exp(exponents))


def characteristic_function(model, alpha, seed, draws, batch=None):
    """
    Monte Carlo estimate of E exp(i alpha F).

    Returns:
        tuple: (re, im, stderr)
    """
    values = _draws(model, seed, draws, batch)
    phase = float(alpha) * values
    cosines = np.cos(phase)
    sines = np.sin(phase)
    n = values.shape[0]
    stderr = math.sqrt((np.var(cosines) + np.var(sines)) / n) if n > 1 else float('nan')
    return float(np.mean(cosines)), float(np.mean(sines)), stderr


def _block_values(model, nodes=None):
    """Kernel blocks sum_r w(n,r) cos(6 pi r t) on a periodic grid of [0, 1)."""
    if nodes is None:
        nodes = max(current_lab().config['EXACT_TRANSFORM_NODES'], 48 * model.R_model)
    t = np.arange(nodes, dtype=np.float64) / nodes
    r = np.arange(1, model.R_model + 1, dtype=np.float64)
    return model.weights @ np.cos(6.0 * math.pi * np.multiply.outer(r, t))


def log_laplace_exact(model, lam, nodes=None):
    """
    log E exp(lambda F) by the product over kernels of the block integrals.

    Each factor is a periodic trapezoid rule, spectrally accurate for the
    smooth periodic integrand.
    """
    if model.size == 0:
        return 0.0
    blocks = _block_values(model, nodes)
    n_nodes = blocks.shape[1]
    logs = logsumexp(float(lam) * blocks, axis=1) - math.log(n_nodes)
    return float(compensated_sum(logs))


def laplace_transform_exact(model, lam, nodes=None):
    value = log_laplace_exact(model, lam, nodes)
    if value > _EXP_LIMIT:
        raise NumericError(f'E exp(lambda F) overflows at lambda={lam}: log value {value}')
    return math.exp(value)


def characteristic_function_exact(model, alpha, nodes=None):
    """E exp(i alpha F) as a product of per-kernel block integrals."""
    if model.size == 0:
        return complex(1.0, 0.0)
    blocks = _block_values(model, nodes)
    factors = np.mean(np.exp(1j * float(alpha) * blocks), axis=1)
    return complex(np.prod(factors))


def model_characteristic_function(model, nodes=None):
    """Vectorized alpha -> E exp(i alpha F) sharing one block table."""
    blocks = _block_values(model, nodes) if model.size else None

    def phi(alpha):
        alpha_arr = np.asarray(alpha, dtype=np.float64)
        if blocks is None:
            values = np.ones(alpha_arr.shape, dtype=np.complex128)
        else:
            values = np.array(
                [np.prod(np.mean(np.exp(1j * a * blocks), axis=1)) for a in alpha_arr.ravel()],
                dtype=np.complex128,
            ).reshape(alpha_arr.shape)
        return complex(values) if values.ndim == 0 else values
    return phi


def monte_carlo_moments(model, ks, seed, draws, batch=None):
    """
    Raw and absolute moments E F^k and E|F|^k with standard errors.

    Returns:
        dict: k -> {'raw', 'raw_stderr', 'abs', 'abs_stderr'}
    """
    values = _draws(model, seed, draws, batch)
    n = values.shape[0]
    result = {}
    for k in ks:
        k = int(k)
        raw = values ** k
        absolute = np.abs(values) ** k
        result[k] = {
            'raw': float(np.mean(raw)),
            'raw_stderr': float(np.std(raw) / math.sqrt(n)),
            'abs': float(np.mean(absolute)),
            'abs_stderr': float(np.std(absolute) / math.sqrt(n)),
        }
    return result


def moment_bound_report(model, ks, seed, draws, c1=20.0, c2=20.0, batch=None, n_start=1):
    """
    Absolute moments against min{(c1 k^(2/3) (log 2k)^(2/3))^k, (c2 k N^(-1/3))^(k/2)}.

    The fitted constants are the smallest c1, c2 for which each bound alone
    would hold at every k.
    """
    moments = monte_carlo_moments(model, ks, seed, draws, batch)
    rows = []
    fitted_c1 = 0.0
    fitted_c2 = 0.0
    for k, stats in moments.items():
        m_k = stats['abs']
        first = (c1 * k ** (2.0 / 3.0) * math.log(2 * k) ** (2.0 / 3.0)) ** k
        second = (c2 * k * n_start ** (-1.0 / 3.0)) ** (k / 2.0)
        if m_k > 0:
            fitted_c1 = max(fitted_c1, m_k ** (1.0 / k) / (k ** (2.0 / 3.0) * math.log(2 * k) ** (2.0 / 3.0)))
            fitted_c2 = max(fitted_c2, m_k ** (2.0 / k) * n_start ** (1.0 / 3.0) / k)
        rows.append({
            'k': k,
            'moment': m_k,
            'stderr': stats['abs_stderr'],
            'bound': min(first, second),
            'within_bound': bool(m_k <= min(first, second)),
        })
    return {'rows': rows, 'c1': c1, 'c2': c2, 'fitted_c1': fitted_c1, 'fitted_c2': fitted_c2}


# Exponents of the Laplace envelope exp(c lambda^(8/7)) <= E e^(lambda F) <= exp(c lambda^(5/2))
LAPLACE_LOWER_EXPONENT = 8.0 / 7.0
LAPLACE_UPPER_EXPONENT = 5.0 / 2.0
# Exponent implied by the tail argument, V = 2c lambda^(3/2)
LAPLACE_TAIL_EXPONENT = 3.0 / 2.0


def laplace_growth_exponent(model, lambdas, nodes=None):
    """
    Slope theta of log log E e^(lambda F) against log lambda.

    Uses the exact product transform. Reports both printed upper exponents,
    5/2 from the envelope and 3/2 from the tail argument, since they disagree.

    Returns:
        dict
    """
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if np.any(lambdas <= 0):
        raise DomainError('growth fit needs positive lambdas')
    logs = np.array([log_laplace_exact(model, lam, nodes) for lam in lambdas])
    if np.any(logs <= 0):
        raise NumericError(f'log E e^(lambda F) must be positive for the fit, got {logs.min()}')
    theta, intercept = np.polyfit(np.log(lambdas), np.log(logs), 1)
    low = LAPLACE_LOWER_EXPONENT - 0.1
    high = LAPLACE_UPPER_EXPONENT + 0.25
    return {
        'lambdas': lambdas.tolist(),
        'log_laplace': logs.tolist(),
        'theta': float(theta),
        'intercept': float(intercept),
        'envelope': [low, high],
        'within_envelope': bool(low <= theta <= high),
        'upper_exponent_printed': LAPLACE_UPPER_EXPONENT,
        'upper_exponent_from_tail_argument': LAPLACE_TAIL_EXPONENT,
        'exponent_discrepancy': True,
    }


def chernoff_tail_bound(model, V, lambdas, nodes=None):
    """
    min over lambda of exp(-lambda V) E exp(lambda F), an upper bound on P(F > V).

    Returns:
        tuple: (bound, best lambda)
    """
    best, best_lam = math.inf, None
    for lam in lambdas:
        value = log_laplace_exact(model, lam, nodes) - float(lam) * float(V)
        if value < best:
            best, best_lam = value, float(lam)
    return math.exp(min(best, 0.0)), best_lam


def model_coefficients(model):
    """
    The sequence a_m, m <= N_model R_model^3, that realizes the model as
    sum_m a_m cos(6 pi r_m X_(kernel of m)).

    Returns:
        ndarray: a_1..a_M (index 0 holds a_1)
    """
    M = model.N_model * model.R_model ** 3
    coeffs = np.zeros(M, dtype=np.float64)
    r = np.arange(1, model.R_model + 1, dtype=np.int64)
    for i, n in enumerate(model.kernels):
        coeffs[n * r ** 3 - 1] = model.weights[i]
    return coeffs
