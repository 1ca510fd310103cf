"""
Exact diagonal combinatorics for cube-root frequencies.

A signed tuple (n_j, e_j) is diagonal when sum e_j n_j^(1/3) = 0. Cube roots
of distinct cube-free integers are linearly independent over the rationals,
so the tuple is diagonal exactly when, for every cube-free kernel k, the
signed sum of the roots r_j of the indices n_j = k r_j^3 vanishes. Every
diagonal decision here is made that way, in integers.
"""
import logging
import math

import mpmath
import numpy as np
from numba import njit, prange
from scipy import integrate

from gl3lab import current_lab
from gl3lab.models import DiagonalSystem, GapResult
from gl3lab.utils.number_theory import cubefree_kernels
from gl3lab.utils.summation import compensated_sum
from gl3lab.utils.validators import DomainError, NumericError, ResourceError, validate_positive_int

logger = logging.getLogger(__name__)


@njit(cache=True)
def _is_diagonal(kern, root, indices, signs):
    h = indices.shape[0]
    for j in range(h):
        kj = kern[indices[j]]
        seen = False
        for i in range(j):
            if kern[indices[i]] == kj:
                seen = True
                break
        if seen:
            continue
        total = 0
        for i in range(j, h):
            if kern[indices[i]] == kj:
                total += signs[i] * root[indices[i]]
        if total != 0:
            return False
    return True


@njit(cache=True)
def _decode(code, h, base, values, signs, idx_out, sign_out):
    """Mixed-radix digits of code, most significant first, as (value, sign) pairs."""
    rem = code
    for pos in range(h - 1, -1, -1):
        digit = rem % base
        rem //= base
        idx_out[pos] = values[digit // 2]
        sign_out[pos] = signs[digit % 2]


@njit(parallel=True, cache=True)
def _count_solutions(kern, root, values, h, base, per_lead):
    counts = np.zeros(base, dtype=np.int64)
    sign_table = np.array([1, -1], dtype=np.int64)
    for lead in prange(base):
        idx = np.empty(h, dtype=np.int64)
        sgn = np.empty(h, dtype=np.int64)
        found = 0
        for rest in range(per_lead):
            _decode(lead * per_lead + rest, h, base, values, sign_table, idx, sgn)
            if _is_diagonal(kern, root, idx, sgn):
                found += 1
        counts[lead] = found
    return counts


@njit(parallel=True, cache=True)
def _fill_solutions(kern, root, values, h, base, per_lead, offsets, out_idx, out_sgn):
    sign_table = np.array([1, -1], dtype=np.int64)
    for lead in prange(base):
        idx = np.empty(h, dtype=np.int64)
        sgn = np.empty(h, dtype=np.int64)
        slot = offsets[lead]
        for rest in range(per_lead):
            _decode(lead * per_lead + rest, h, base, values, sign_table, idx, sgn)
            if _is_diagonal(kern, root, idx, sgn):
                out_idx[slot, :] = idx
                out_sgn[slot, :] = sgn
                slot += 1


def _enumeration_guard(h, M, what):
    config = current_lab().config
    terms = (2 * M) ** h
    if h > config['DIAGONAL_MAX_H'] or M > config['DIAGONAL_MAX_M'] or terms > config['DIAGONAL_MAX_TERMS']:
        raise ResourceError(
            f'{what} with h={h}, M={M} enumerates {terms} signed tuples, beyond the guard '
            f'(h <= {config["DIAGONAL_MAX_H"]}, M <= {config["DIAGONAL_MAX_M"]}, '
            f'{config["DIAGONAL_MAX_TERMS"]} tuples); use the Monte Carlo moments instead')


def diagonal_solutions(h, M):
    """
    All (n_1..n_h, e_1..e_h) in [1, M]^h x {+1, -1}^h with sum e_j n_j^(1/3) = 0.

    Tuples are listed in lexicographic order of (n_1, e_1, ..., n_h, e_h),
    with +1 ordered before -1.

    Returns:
        DiagonalSystem
    """
    h = validate_positive_int('h', h)
    M = validate_positive_int('M', M)
    _enumeration_guard(h, M, 'diagonal enumeration')

    kern, root = cubefree_kernels(M)
    values = np.arange(1, M + 1, dtype=np.int64)
    base = 2 * M
    counts = _count_solutions(kern, root, values, h, base, base ** (h - 1))
    offsets = np.zeros(base, dtype=np.int64)
    offsets[1:] = np.cumsum(counts)[:-1]
    total = int(counts.sum())
    indices = np.zeros((total, h), dtype=np.int64)
    signs = np.zeros((total, h), dtype=np.int64)
    if total:
        _fill_solutions(kern, root, values, h, base, base ** (h - 1), offsets, indices, signs)
    logger.debug(f'{total} diagonal solutions for h={h}, M={M}')
    return DiagonalSystem(h=h, M=M, indices=indices, signs=signs,
                          kernels=kern[indices], roots=root[indices])


def _coefficient_array(coeffs):
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise DomainError('coefficients must be a nonempty sequence a_1..a_M')
    return coeffs


def _kernel_moments(b_by_root, h):
    """E Y^p for p <= h, Y = sum_r b_r cos(6 pi r X): constant terms of a Laurent power."""
    R = max(b_by_root)
    poly = np.zeros(2 * R + 1, dtype=np.float64)
    for r, b in b_by_root.items():
        poly[R + r] += b / 2.0
        poly[R - r] += b / 2.0
    moments = [1.0]
    current = np.ones(1, dtype=np.float64)
    for p in range(1, h + 1):
        current = np.convolve(current, poly)
        moments.append(float(current[p * R]))
    return moments


def model_moment_exact(coeffs, h, method='kernel'):
    """
    E (sum_m a_m cos(6 pi r_m X_(kernel of m)))^h with independent uniform X per kernel.

    Args:
        coeffs: a_1..a_M
        h: Power
        method: 'kernel' combines exact per-kernel moments of independent
            blocks; 'diagonal' sums 2^-h prod a over the diagonal solutions

    Returns:
        float
    """
    h = validate_positive_int('h', h)
    coeffs = _coefficient_array(coeffs)
    M = coeffs.size
    if h > current_lab().config['DIAGONAL_MAX_H']:
        raise ResourceError(f'exact moments are limited to h <= {current_lab().config["DIAGONAL_MAX_H"]}')

    if method == 'diagonal':
        system = diagonal_solutions(h, M)
        if system.count == 0:
            return 0.0
        products = np.prod(coeffs[system.indices - 1], axis=1)
        return float(compensated_sum(products) / 2.0 ** h)
    if method != 'kernel':
        raise DomainError(f"method must be 'kernel' or 'diagonal', got {method!r}")

    kern, root = cubefree_kernels(M)
    blocks = {}
    for m in np.flatnonzero(coeffs) + 1:
        blocks.setdefault(int(kern[m]), {})[int(root[m])] = float(coeffs[m - 1])

    total = [1.0] + [0.0] * h
    for kernel in sorted(blocks):
        block = _kernel_moments(blocks[kernel], h)
        total = [
            sum(math.comb(j, i) * total[i] * block[j - i] for i in range(j + 1))
            for j in range(h + 1)
        ]
    return float(total[h])


@njit(cache=True)
def _diagonal_mask(kern, root, values, h, base, total):
    mask = np.zeros(total, dtype=np.bool_)
    sign_table = np.array([1, -1], dtype=np.int64)
    idx = np.empty(h, dtype=np.int64)
    sgn = np.empty(h, dtype=np.int64)
    for code in range(total):
        _decode(code, h, base, values, sign_table, idx, sgn)
        mask[code] = _is_diagonal(kern, root, idx, sgn)
    return mask


def gap_bound(m, M):
    """(m M^(1/3))^-(3^(m-1) - 1)."""
    return (m * M ** (1.0 / 3.0)) ** (-(3 ** (m - 1) - 1))


def lemma62_min_gap(m, M):
    """
    Smallest nonzero |sum_{j<=m} e_j n_j^(1/3)| over n_j <= M.

    The search runs in long double; the minimizing tuple is re-evaluated
    with mpmath at 50 digits.

    Returns:
        GapResult: unpacks as (min_gap, bound, witness)
    """
    m = validate_positive_int('m', m)
    M = validate_positive_int('M', M)
    config = current_lab().config
    if m > config['GAP_MAX_TERMS'] or M > config['GAP_MAX_INDEX']:
        raise ResourceError(
            f'gap search is limited to m <= {config["GAP_MAX_TERMS"]}, '
            f'M <= {config["GAP_MAX_INDEX"]}; got m={m}, M={M}')

    kern, root = cubefree_kernels(M)
    values = np.arange(1, M + 1, dtype=np.int64)
    base = 2 * M
    roots = np.cbrt(values.astype(np.longdouble))
    signed = np.empty(base, dtype=np.longdouble)
    signed[0::2] = roots
    signed[1::2] = -roots
    sums = signed.copy()
    for _ in range(m - 1):
        sums = (sums[:, None] + signed[None, :]).ravel()

    candidates = np.abs(sums)
    candidates[_diagonal_mask(kern, root, values, m, base, base ** m)] = np.inf
    best = int(np.argmin(candidates))

    idx = np.empty(m, dtype=np.int64)
    sgn = np.empty(m, dtype=np.int64)
    _decode(best, m, base, values, np.array([1, -1], dtype=np.int64), idx, sgn)
    witness = tuple(int(n) for n in idx) + tuple(int(s) for s in sgn)
    with mpmath.workdps(50):
        exact = abs(mpmath.fsum(int(s) * mpmath.cbrt(int(n)) for n, s in zip(idx, sgn)))
        min_gap = float(exact)

    result = GapResult(m=m, M=M, min_gap=min_gap, bound=gap_bound(m, M), witness=witness)
    if not result.holds:
        logger.error(f'Gap bound fails at m={m}, M={M}: {result.to_dict()}')
        raise NumericError(f'min gap {min_gap} below bound {result.bound} at m={m}, M={M}')
    return result


@njit(cache=True)
def _u2_cos_integral(u, k):
    """Integral of v^2 cos(k v) over [0, u]."""
    x = k * u
    if abs(x) < 0.5:
        # Taylor series, alternating, terms fall below 1e-17 well before j = 12
        total = 0.0
        term = u * u * u
        for j in range(12):
            total += term / (2 * j + 3)
            term *= -x * x / ((2 * j + 1) * (2 * j + 2))
        return total
    s = math.sin(x)
    c = math.cos(x)
    return u * u * s / k + 2.0 * u * c / (k * k) - 2.0 * s / (k * k * k)


@njit(cache=True)
def _expand_time_average(a, cbrts, kern_of, root_of, h, total_terms, alpha, u0, u1):
    """
    Sum over the (2S)^h signed tuples of prod a times the integral of
    3u^2 cos(2 pi beta u) over [u0, u1], with the off-diagonal bound.
    """
    S = a.shape[0]
    base = 2 * S
    idx = np.empty(h, dtype=np.int64)
    sgn = np.empty(h, dtype=np.int64)
    sign_table = np.array([1, -1], dtype=np.int64)
    positions = np.arange(S)
    acc = 0.0
    comp = 0.0
    off_bound = 0.0
    for code in range(total_terms):
        _decode(code, h, base, positions, sign_table, idx, sgn)
        prod = 1.0
        beta = 0.0
        for j in range(h):
            prod *= a[idx[j]]
            beta += sgn[j] * cbrts[idx[j]]
        if _is_diagonal(kern_of, root_of, idx, sgn):
            piece = prod * (u1 * u1 * u1 - u0 * u0 * u0)
        else:
            k = 6.0 * math.pi * alpha * beta
            piece = prod * 3.0 * (_u2_cos_integral(u1, k) - _u2_cos_integral(u0, k))
            off_bound += abs(prod) * 6.0 * u1 * u1 / abs(k)
        t = acc + piece
        if abs(acc) >= abs(piece):
            comp += (acc - t) + piece
        else:
            comp += (piece - t) + acc
        acc = t
    return acc + comp, off_bound


def _support(coeffs):
    support = np.flatnonzero(coeffs) + 1
    kern, root = cubefree_kernels(int(coeffs.size))
    return support, kern[support], root[support]


def _time_average_quadrature(coeffs, alpha, h, T):
    support = np.flatnonzero(coeffs) + 1
    a = coeffs[support - 1]
    freq = 6.0 * math.pi * alpha * np.cbrt(support.astype(np.float64))
    u0, u1 = T ** (1.0 / 3.0), (2.0 * T) ** (1.0 / 3.0)

    def integrand(u):
        return 3.0 * u * u * np.sum(a * np.cos(freq * u)) ** h

    # one subinterval per period of the fastest harmonic in the power
    period = 2.0 * math.pi / max(h * float(freq.max()), 1e-12)
    edges = np.linspace(u0, u1, max(2, int(math.ceil((u1 - u0) / period)) + 1))
    pieces = [integrate.quad(integrand, lo, hi, epsrel=1e-9, limit=200)[0]
              for lo, hi in zip(edges[:-1], edges[1:])]
    return compensated_sum(np.asarray(pieces)) / T


def time_average_power(coeffs, alpha0, h, T, fallback=True, with_bound=False):
    """
    (1/T) integral over [T, 2T] of (sum_m a_m cos(6 pi alpha0 (m t)^(1/3)))^h dt.

    With t = u^3 the power expands into terms cos(2 pi beta u), each
    integrated against 3u^2 in closed form; diagonal terms (beta = 0,
    decided in integers) contribute their product exactly.

    Args:
        coeffs: a_1..a_M
        alpha0: Nonzero frequency scale, only |alpha0| matters
        h: Power
        T: Window start
        fallback: Use adaptive quadrature when the expansion is too large
        with_bound: Also return the bound on the off-diagonal part

    Returns:
        float, or (float, float) with with_bound
    """
    h = validate_positive_int('h', h)
    coeffs = _coefficient_array(coeffs)
    if float(alpha0) == 0.0:
        raise DomainError('alpha0 must be nonzero')
    alpha = abs(float(alpha0))
    T = float(T)
    if T <= 0:
        raise DomainError(f'T must be positive, got {T}')

    support, kern, root = _support(coeffs)
    if support.size == 0:
        return (0.0, 0.0) if with_bound else 0.0
    terms = (2 * support.size) ** h
    if terms > current_lab().config['TRIG_EXPANSION_MAX_TERMS']:
        if not fallback:
            raise ResourceError(
                f'trigonometric expansion has {terms} terms, beyond the guard; enable the fallback')
        logger.info(f'Time average with {terms} expansion terms falls back to quadrature')
        value = _time_average_quadrature(coeffs, alpha, h, T)
        return (value, float('nan')) if with_bound else value

    # kernel labels are remapped onto positions in the support
    cbrts = np.cbrt(support.astype(np.float64))
    kern_of = np.zeros(support.size, dtype=np.int64)
    labels = {}
    for i, k in enumerate(kern):
        kern_of[i] = labels.setdefault(int(k), len(labels))
    u0, u1 = T ** (1.0 / 3.0), (2.0 * T) ** (1.0 / 3.0)
    total, off_bound = _expand_time_average(
        coeffs[support - 1], cbrts, kern_of, root.astype(np.int64), h, terms, alpha, u0, u1)
    scale = 2.0 ** h * T
    value = float(total / scale)
    if with_bound:
        return value, float(off_bound / scale)
    return value


def off_diagonal_bound(coeffs, alpha0, h, T):
    """Upper bound on |time average - model moment| from one integration by parts."""
    return time_average_power(coeffs, alpha0, h, T, fallback=False, with_bound=True)[1]


def lemma63_report(coeffs, h, Ts, alpha0=1.0):
    """
    Time averages against the model moment at several T.

    Returns:
        list: rows {h, M, T, time_average, model_moment, gap, bound_T_minus_2_9, off_diagonal_bound}
    """
    coeffs = _coefficient_array(coeffs)
    model = model_moment_exact(coeffs, h)
    rows = []
    for T in Ts:
        average, off_bound = time_average_power(coeffs, alpha0, h, T, with_bound=True)
        rows.append({
            'h': int(h),
            'M': int(coeffs.size),
            'T': float(T),
            'time_average': average,
            'model_moment': model,
            'gap': abs(average - model),
            'bound_T_minus_2_9': 5.0 * float(T) ** (-2.0 / 9.0),
            'off_diagonal_bound': off_bound,
        })
    return rows


def gap_trend(rows):
    """
    Per power h, whether the lemma63_report gaps are nonincreasing in T and
    whether each stays under 5 T^(-2/9).

    A near-resonant frequency sum (small but nonzero sum e_j n_j^(1/3)) keeps
    its cosine almost constant over the window, so the gap can grow with T
    while staying under the bound.

    Returns:
        dict: {h: {'nonincreasing': bool, 'within_bound': bool}}
    """
    trend = {}
    for h in sorted({row['h'] for row in rows}):
        group = sorted((row for row in rows if row['h'] == h), key=lambda row: row['T'])
        trend[h] = {
            'nonincreasing': all(a['gap'] >= b['gap'] for a, b in zip(group, group[1:])),
            'within_bound': all(row['gap'] <= row['bound_T_minus_2_9'] for row in group),
        }
    return trend
