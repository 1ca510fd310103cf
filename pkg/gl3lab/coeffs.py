"""
Coefficient providers for GL(3)-type sequences A(n, 1).

Three providers are supported: the triple divisor function, the
symmetric-square lift of a GL(2) eigenform, and external files.
"""
import logging
import math
from itertools import product

import numpy as np
from numba import njit

from gl3lab import current_lab
from gl3lab.error_term import main_term_d3_coefficients
from gl3lab.models import CoefficientTable, GL2Eigenvalues, HeckeReport, MainTerm, Provider
from gl3lab.utils.modular import ramanujan_tau, ramanujan_tau_at_primes
from gl3lab.utils.number_theory import (
    cubefree_decompose,
    divisor3_counts,
    factorize,
    integer_cube_root,
    is_cubefree,
    prime_sieve,
    smallest_prime_factors,
)
from gl3lab.utils.summation import compensated_cumsum_squares
from gl3lab.utils.validators import (
    DimensionError,
    FormatError,
    ResourceError,
    check_memory_budget,
    validate_positive_int,
)

logger = logging.getLogger(__name__)

NORMALIZATION_HEADER = '# normalization: hecke-unitary'

__all__ = [
    'sieve_divisor3',
    'lift_sym_square',
    'load_coefficients',
    'save_coefficients',
    'cubefree_decompose',
    'hecke_consistency_check',
    'check_multiplicativity',
    'check_gl2_hecke',
    'gl2_from_primes',
    'ramanujan_tau_eigenvalues',
    'rankin_selberg_profile',
    'partial_sum_growth',
]


def rankin_selberg_constant(values):
    """
    Smallest K with sum_{n<=x} a(n)^2 <= K x for every integer 1 <= x <= N.
    """
    squares = compensated_cumsum_squares(np.asarray(values, dtype=np.float64))
    x = np.arange(1, squares.shape[0], dtype=np.float64)
    if x.size == 0:
        return 0.0
    return float(np.max(squares[1:] / x))


def sieve_divisor3(N):
    """
    Triple divisor function d3(1..N) by two divisor passes.

    Args:
        N: Table length

    Returns:
        CoefficientTable: divisor3 table with the residue main term attached
    """
    N = validate_positive_int('N', N)
    budget = current_lab().config['MEMORY_BUDGET_BYTES']
    # d, d3 and the float copy
    check_memory_budget(f'divisor3 sieve of length {N}', 3 * 8 * (N + 1), budget)

    logger.info(f'Sieving d3 up to {N}')
    try:
        exact = divisor3_counts(N)
    except MemoryError:
        raise ResourceError(f'divisor3 sieve of length {N} needs {3 * 8 * (N + 1)} bytes')

    values = exact.astype(np.float64)
    return CoefficientTable(
        values=values,
        provider=Provider.DIVISOR3,
        has_pole=True,
        main_term=MainTerm(*main_term_d3_coefficients()),
        rankin_selberg_constant=rankin_selberg_constant(values),
        exact_values=exact,
        metadata={'generator': 'two-pass divisor sieve'},
    )


@njit(cache=True)
def _hecke_dense(lam_p, spf, M):
    lam = np.zeros(M + 1, dtype=np.float64)
    if M >= 1:
        lam[1] = 1.0
    for n in range(2, M + 1):
        p = spf[n]
        rest = n
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        prev = 1.0
        cur = lam_p[p]
        for _ in range(e - 1):
            nxt = lam_p[p] * cur - prev
            prev = cur
            cur = nxt
        lam[n] = cur * lam[rest]
    return lam


@njit(cache=True)
def _lambda_at_squares(lam_p, spf, N):
    out = np.zeros(N + 1, dtype=np.float64)
    if N >= 1:
        out[1] = 1.0
    for m in range(2, N + 1):
        p = spf[m]
        rest = m
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        # lambda(p^(2e)) from lambda(p^(j+1)) = lambda(p) lambda(p^j) - lambda(p^(j-1))
        prev = 1.0
        cur = lam_p[p]
        for _ in range(2 * e - 1):
            nxt = lam_p[p] * cur - prev
            prev = cur
            cur = nxt
        out[m] = cur * out[rest]
    return out


@njit(cache=True)
def _square_divisor_convolution(lam_sq, N):
    a = np.zeros(N + 1, dtype=np.float64)
    d = 1
    while d * d <= N:
        dd = d * d
        for m in range(1, N // dd + 1):
            a[dd * m] += lam_sq[m]
        d += 1
    return a


def _prime_lambda_table(gl2, N):
    """lambda(p) at every prime p <= N, indexed by p."""
    lam_p = np.zeros(N + 1, dtype=np.float64)
    known = np.zeros(N + 1, dtype=np.bool_)
    dense = min(gl2.length, N)
    lam_p[:dense + 1] = gl2.values[:dense + 1]
    known[:dense + 1] = True
    if gl2.primes is not None:
        mask = gl2.primes <= N
        lam_p[gl2.primes[mask]] = gl2.prime_values[mask]
        known[gl2.primes[mask]] = True
    missing = np.flatnonzero(prime_sieve(N) & ~known)
    if missing.size:
        raise DimensionError(
            f'sym-square lift to N={N} needs lambda(p) for every prime p <= {N}; '
            f'first missing prime is {int(missing[0])}')
    return lam_p


def gl2_from_primes(primes, prime_values, M, source='external'):
    """
    Dense lambda(1..M) from prime eigenvalues via Hecke multiplicativity.

    Args:
        primes: Increasing primes covering every prime <= M
        prime_values: lambda(p) for those primes
        M: Dense table length
        source: Provenance label

    Returns:
        GL2Eigenvalues: dense table plus the prime values
    """
    M = validate_positive_int('M', M)
    primes = np.asarray(primes, dtype=np.int64)
    prime_values = np.asarray(prime_values, dtype=np.float64)
    lam_p = np.zeros(M + 1, dtype=np.float64)
    mask = primes <= M
    lam_p[primes[mask]] = prime_values[mask]
    dense = _hecke_dense(lam_p, smallest_prime_factors(M), M)
    return GL2Eigenvalues(values=dense, primes=primes, prime_values=prime_values, source=source)


def ramanujan_tau_eigenvalues(P, M=None):
    """
    Normalized eigenvalues lambda(n) = tau(n) / n^(11/2) of the discriminant form.

    Args:
        P: Prime bound for lambda(p)
        M: Dense table length (defaults to min(P, 10**4))

    Returns:
        GL2Eigenvalues
    """
    P = validate_positive_int('P', P)
    M = min(P, 10 ** 4) if M is None else validate_positive_int('M', M)
    primes, taus = ramanujan_tau_at_primes(max(P, 2))
    prime_values = np.array(
        [float(t) / (p ** 5 * math.sqrt(p)) for p, t in zip(primes.tolist(), taus)],
        dtype=np.float64,
    )
    if M > P:
        # Dense part beyond the prime bound comes straight from tau
        dense = np.zeros(M + 1, dtype=np.float64)
        dense[1:] = [float(t) / (n ** 5 * math.sqrt(n)) for n, t in enumerate(ramanujan_tau(M), 1)]
        return GL2Eigenvalues(values=dense, primes=primes, prime_values=prime_values,
                              source='ramanujan_tau')
    return gl2_from_primes(primes, prime_values, M, source='ramanujan_tau')


def lift_sym_square(gl2, N):
    """
    Coefficients of L(s, sym^2 f) = zeta(2s) sum lambda(n^2) n^-s.

    Uses the dense eigenvalue table when it reaches N^2, otherwise derives
    lambda(m^2) for m <= N from the prime eigenvalues.

    Args:
        gl2: GL2Eigenvalues
        N: Table length

    Returns:
        CoefficientTable: sym_square table, no pole
    """
    N = validate_positive_int('N', N)
    config = current_lab().config

    if gl2.length >= N * N:
        if N > config['SYM_SQUARE_DENSE_MAX_N']:
            raise ResourceError(
                f'dense sym-square lift is capped at N={config["SYM_SQUARE_DENSE_MAX_N"]}, got {N}')
        logger.info(f'Sym-square lift to {N} from dense eigenvalues')
        lam_sq = np.zeros(N + 1, dtype=np.float64)
        lam_sq[1:] = gl2.values[np.arange(1, N + 1, dtype=np.int64) ** 2]
        path = 'dense'
    elif gl2.primes is not None and gl2.prime_bound >= N:
        if N > config['SYM_SQUARE_MAX_N']:
            raise ResourceError(
                f'sym-square lift is capped at N={config["SYM_SQUARE_MAX_N"]}, got {N}')
        logger.info(f'Sym-square lift to {N} from prime eigenvalues')
        lam_p = _prime_lambda_table(gl2, N)
        lam_sq = _lambda_at_squares(lam_p, smallest_prime_factors(N), N)
        path = 'prime'
    else:
        raise DimensionError(
            f'sym-square lift to N={N} needs {N * N} dense eigenvalues or prime '
            f'eigenvalues up to {N}; got length {gl2.length}, prime bound {gl2.prime_bound}')

    values = _square_divisor_convolution(lam_sq, N)
    return CoefficientTable(
        values=values,
        provider=Provider.SYM_SQUARE,
        has_pole=False,
        rankin_selberg_constant=rankin_selberg_constant(values),
        metadata={'source': gl2.source, 'lift_path': path},
    )


def _validation_warnings(values, provider):
    warnings = []
    if abs(values[1] - 1.0) > 1e-12:
        warnings.append(f'a(1) = {values[1]!r}, expected 1 for Hecke normalization')
    return warnings


def load_coefficients(path):
    """
    Read an external coefficient file.

    Args:
        path: Path to a UTF-8 file of "n value" records

    Returns:
        CoefficientTable: external table; invariant violations are listed as warnings
    """
    records = []
    has_header = False
    with open(path, encoding='utf-8') as handle:
        for line_no, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith('#'):
                if line.replace(' ', '') == NORMALIZATION_HEADER.replace(' ', ''):
                    has_header = True
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f'{path}:{line_no}: expected "n value", got {line!r}')
            try:
                n = int(parts[0])
                value = float(parts[1])
            except ValueError:
                raise FormatError(f'{path}:{line_no}: cannot parse {line!r}')
            if not math.isfinite(value):
                raise FormatError(f'{path}:{line_no}: value {parts[1]} is not finite')
            expected = len(records) + 1
            if n != expected:
                if expected == 1:
                    raise FormatError(f'{path}:{line_no}: index must start at 1, got {n}')
                raise FormatError(
                    f'{path}:{line_no}: non-contiguous index {n}, expected {expected}')
            records.append(value)

    if not records:
        raise FormatError(f'{path}: no coefficient records')

    values = np.zeros(len(records) + 1, dtype=np.float64)
    values[1:] = records
    warnings = _validation_warnings(values, Provider.EXTERNAL)
    if not has_header:
        warnings.append(f'missing header {NORMALIZATION_HEADER!r}')
    for message in warnings:
        logger.warning(f'{path}: {message}')

    return CoefficientTable(
        values=values,
        provider=Provider.EXTERNAL,
        has_pole=False,
        rankin_selberg_constant=rankin_selberg_constant(values),
        warnings=tuple(warnings),
        metadata={'path': str(path)},
    )


def save_coefficients(table, path):
    """Write a table in the external coefficient format."""
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(NORMALIZATION_HEADER + '\n')
        handle.write(f'# provider: {table.provider.value}\n')
        handle.write(f'# length: {table.length}\n')
        if table.exact_values is not None:
            for n in range(1, table.length + 1):
                handle.write(f'{n} {int(table.exact_values[n])}\n')
        else:
            for n in range(1, table.length + 1):
                handle.write(f'{n} {float(table.values[n])!r}\n')
    logger.info(f'Wrote {table.length} coefficients to {path}')


def _table_scalars(table, bound):
    """A(n,1) for n <= bound, as exact ints when the table retains them."""
    if table.exact_values is not None:
        return [int(v) for v in table.exact_values[:bound + 1]]
    return [float(v) for v in table.values[:bound + 1]]


def _complete_homogeneous(e1, e2, e3, k_max):
    """h_0..h_k_max of three variables from their elementary symmetric functions."""
    h = [1]
    for k in range(1, k_max + 1):
        value = e1 * h[k - 1]
        if k >= 2:
            value -= e2 * h[k - 2]
        if k >= 3:
            value += e3 * h[k - 3]
        h.append(value)
    return h


class _SchurOracle:
    """
    A(m1, m2) of a self-dual GL(3) form computed directly from A(p, 1).

    At a prime the Satake parameters have e1 = e2 = A(p, 1) and e3 = 1, and
    A(p^a, p^b) is the Schur polynomial of shape (a + b, b, 0), evaluated by
    the Jacobi-Trudi determinant in complete homogeneous polynomials.
    """

    def __init__(self, scalars, spf):
        self.scalars = scalars
        self.spf = spf
        self._local = {}

    def local(self, p, a, b):
        key = (p, a, b)
        if key not in self._local:
            e1 = self.scalars[p]
            h = _complete_homogeneous(e1, e1, 1, a + b + 1)
            if b == 0:
                value = h[a]
            else:
                value = h[a + b] * h[b] - h[a + b + 1] * h[b - 1]
            self._local[key] = value
        return self._local[key]

    def __call__(self, m1, m2):
        f1 = dict(factorize(m1, self.spf))
        f2 = dict(factorize(m2, self.spf))
        value = 1
        for p in sorted(set(f1) | set(f2)):
            value = value * self.local(p, f1.get(p, 0), f2.get(p, 0))
        return value


def _divisors(n):
    small = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def hecke_consistency_check(table, bound):
    """
    Check A(m1,1)A(1,m2) = sum_{d | (m1,m2)} A(m1/d, m2/d) for m1, m2 <= bound.

    A(a, b) for b > 1 is derived recursively from the same identity in
    increasing a*b, and compared against the direct Schur evaluation.

    Args:
        table: CoefficientTable
        bound: Largest m1, m2

    Returns:
        HeckeReport: max violations, each normalized by 1 + |lhs|
    """
    bound = validate_positive_int('bound', bound)
    if bound > table.length:
        raise DimensionError(
            f'hecke check up to {bound} needs a table of length {bound}, got {table.length}')

    scalars = _table_scalars(table, bound)
    oracle = _SchurOracle(scalars, smallest_prime_factors(bound))
    exact = table.exact_values is not None
    tolerance = {
        Provider.SYM_SQUARE: current_lab().config['HECKE_RELATIVE_TOLERANCE'],
        Provider.DIVISOR3: 0.0,
    }.get(table.provider)

    report = HeckeReport(bound=bound, provider=table.provider)

    # Row values against the multiplicative oracle
    row = 0.0
    for n in range(1, bound + 1):
        direct = oracle(n, 1)
        row = max(row, abs(scalars[n] - direct) / (1 + abs(direct)))
    report.add('row_hecke', row, tolerance)

    # Recursive derivation in increasing a*b
    pairs = sorted(product(range(1, bound + 1), repeat=2), key=lambda ab: (ab[0] * ab[1], ab))
    derived = {}
    recursive = 0.0
    identity = 0.0
    for m1, m2 in pairs:
        g = math.gcd(m1, m2)
        lhs = scalars[m1] * scalars[m2]
        divisors = _divisors(g)
        derived[(m1, m2)] = lhs - sum(derived[(m1 // d, m2 // d)] for d in divisors[1:])
        direct = oracle(m1, m2)
        recursive = max(recursive, abs(derived[(m1, m2)] - direct) / (1 + abs(direct)))
        rhs = sum(oracle(m1 // d, m2 // d) for d in divisors)
        identity = max(identity, abs(lhs - rhs) / (1 + abs(lhs)))

    report.add('hecke_product', identity, tolerance)
    report.add('recursive_vs_direct', recursive, tolerance)
    if not exact:
        logger.debug(f'Hecke check on {table!r} up to {bound}: {report.to_dict()}')
    if not report.passed:
        logger.warning(f'Hecke relations violated on {table!r}: {report.to_dict()}')
    return report


def check_multiplicativity(table, bound):
    """
    Max |a(mn) - a(m) a(n)| over coprime m, n <= bound.

    Exact integer arithmetic when the table retains integers.
    """
    bound = validate_positive_int('bound', bound)
    if bound * bound > table.length:
        raise DimensionError(
            f'multiplicativity check up to {bound} needs a table of length {bound * bound}')
    values = table.exact_values if table.exact_values is not None else table.values
    worst = 0
    for m in range(1, bound + 1):
        n = np.arange(1, bound + 1, dtype=np.int64)
        n = n[np.gcd(n, m) == 1]
        violation = np.abs(values[m * n] - values[m] * values[n])
        worst = max(worst, violation.max())
    return int(worst) if table.exact_values is not None else float(worst)


def check_gl2_hecke(gl2, bound):
    """
    Max relative violation of lambda(m)lambda(n) = sum_{d|(m,n)} lambda(mn/d^2), mn <= bound.
    """
    bound = validate_positive_int('bound', bound)
    if bound > gl2.length:
        raise DimensionError(f'GL(2) Hecke check up to {bound} needs length {bound}')
    lam = gl2.values
    worst = 0.0
    for m in range(1, bound + 1):
        for n in range(1, bound // m + 1):
            lhs = lam[m] * lam[n]
            rhs = sum(lam[m * n // (d * d)] for d in _divisors(math.gcd(m, n)))
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def rankin_selberg_profile(table):
    """
    Sum_{n<=x} a(n)^2 / x at x in {N/8, N/4, N/2, N}.

    Returns:
        dict: checkpoints, ratios, the recorded constant and whether every
        ratio stays within 4 times the first one
    """
    squares = compensated_cumsum_squares(table.values)
    N = table.length
    checkpoints = sorted({x for x in (N // 8, N // 4, N // 2, N) if x >= 1})
    ratios = [float(squares[x] / x) for x in checkpoints]
    return {
        'checkpoints': checkpoints,
        'ratios': ratios,
        'constant': table.rankin_selberg_constant,
        'bounded': bool(max(ratios) <= 4 * ratios[0]),
    }


def partial_sum_growth(table, n_max=50):
    """
    Fit C in |sum_{r<=x} a(n r^3)| <= C n^(1/4+0.01) x^(3/2+0.01).

    Args:
        table: CoefficientTable
        n_max: Largest cube-free kernel included

    Returns:
        dict: fitted constant and the per-kernel ratios
    """
    N = table.length
    per_kernel = {}
    for n in range(1, min(n_max, N) + 1):
        if not is_cubefree(n):
            continue
        r_max = integer_cube_root(N // n)
        r = np.arange(1, r_max + 1, dtype=np.int64)
        sums = np.abs(np.cumsum(table.values[n * r ** 3]))
        per_kernel[n] = float(np.max(sums / (n ** 0.26 * r.astype(np.float64) ** 1.51)))
    return {'constant': max(per_kernel.values()), 'per_kernel': per_kernel}
