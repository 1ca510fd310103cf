from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from gl3lab.utils.validators import DomainError, ValidationError, validate_alpha


class Provider(str, Enum):
    DIVISOR3 = 'divisor3'
    SYM_SQUARE = 'sym_square'
    EXTERNAL = 'external'


class Precision(str, Enum):
    DOUBLE = 'double'
    EXTENDED = 'extended'


def _sealed(array, dtype=np.float64):
    array = np.array(array, dtype=dtype)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class MainTerm:
    """main(x) = x (c2 log^2 x + c1 log x + c0)."""
    c2: float
    c1: float
    c0: float

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        log_x = np.log(x)
        return x * ((self.c2 * log_x + self.c1) * log_x + self.c0)

    def to_dict(self):
        return {'c2': self.c2, 'c1': self.c1, 'c0': self.c0}


@dataclass(frozen=True)
class CoefficientTable:
    """
    Coefficients a(1..N) stored at values[1..N]; values[0] is 0.
    """
    values: np.ndarray
    provider: Provider
    has_pole: bool = False
    main_term: Optional[MainTerm] = None
    rankin_selberg_constant: float = 0.0
    exact_values: Optional[np.ndarray] = None
    warnings: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'values', _sealed(self.values))
        if self.exact_values is not None:
            object.__setattr__(self, 'exact_values', _sealed(self.exact_values, np.int64))
        if self.values.ndim != 1 or self.values.shape[0] < 2:
            raise ValidationError('coefficient table needs at least one value')
        object.__setattr__(self, 'provider', Provider(self.provider))

    @property
    def length(self):
        return self.values.shape[0] - 1

    def __len__(self):
        return self.length

    def __getitem__(self, n):
        return self.values[n]

    def to_dict(self):
        return {
            'provider': self.provider.value,
            'length': self.length,
            'has_pole': self.has_pole,
            'main_term': self.main_term.to_dict() if self.main_term else None,
            'rankin_selberg_constant': self.rankin_selberg_constant,
            'warnings': list(self.warnings),
            'metadata': self.metadata,
        }

    def __repr__(self):
        return f'<CoefficientTable {self.provider.value} N={self.length}>'


@dataclass(frozen=True)
class GL2Eigenvalues:
    """
    Normalized GL(2) Hecke eigenvalues.

    ``values`` holds lambda(1..M) densely (index 0 unused). ``primes`` and
    ``prime_values`` optionally carry lambda(p) for every prime up to a
    larger bound, from which lambda(n) follows by the Hecke recursion.
    """
    values: np.ndarray
    primes: Optional[np.ndarray] = None
    prime_values: Optional[np.ndarray] = None
    source: str = 'external'

    def __post_init__(self):
        object.__setattr__(self, 'values', _sealed(self.values))
        if self.primes is not None:
            object.__setattr__(self, 'primes', _sealed(self.primes, np.int64))
            object.__setattr__(self, 'prime_values', _sealed(self.prime_values))
            if self.primes.shape != self.prime_values.shape:
                raise ValidationError('primes and prime_values differ in length')

    @property
    def length(self):
        return self.values.shape[0] - 1

    @property
    def prime_bound(self):
        """Largest P such that lambda(p) is known for every prime p <= P."""
        if self.primes is None or self.primes.size == 0:
            return self.length
        return max(int(self.primes[-1]), self.length)

    def __repr__(self):
        return f'<GL2Eigenvalues {self.source} M={self.length} P={self.prime_bound}>'


@dataclass
class HeckeReport:
    bound: int
    provider: Provider
    identities: list = field(default_factory=list)

    def add(self, identity, max_violation, tolerance=None):
        passed = None if tolerance is None else bool(max_violation <= tolerance)
        self.identities.append({
            'identity': identity,
            'max_violation': float(max_violation),
            'tolerance': tolerance,
            'passed': passed,
        })

    def violation(self, identity):
        for entry in self.identities:
            if entry['identity'] == identity:
                return entry['max_violation']
        raise KeyError(identity)

    @property
    def passed(self):
        return all(entry['passed'] is not False for entry in self.identities)

    def to_dict(self):
        return {
            'bound': self.bound,
            'provider': Provider(self.provider).value,
            'identities': self.identities,
            'passed': self.passed,
        }


@dataclass(frozen=True)
class ErrorTermSeries:
    table: CoefficientTable
    prefix: np.ndarray
    main_term: Optional[MainTerm] = None

    def __post_init__(self):
        object.__setattr__(self, 'prefix', _sealed(self.prefix))

    @property
    def length(self):
        return self.table.length

    @property
    def has_pole(self):
        return self.table.has_pole


@dataclass(frozen=True)
class SeriesConstant:
    value: float
    cutoff: int
    tail_bound: float

    def to_dict(self):
        return {'value': self.value, 'cutoff': self.cutoff, 'tail_bound': self.tail_bound}


@dataclass(frozen=True)
class MeanSquareResult:
    x: float
    integral: float
    predicted: float
    ratio: float

    def __iter__(self):
        return iter((self.integral, self.predicted, self.ratio))


@dataclass(frozen=True)
class VoronoiConfig:
    alpha: float = 0.6
    sample_count: int = 100
    argument_precision: Precision = Precision.DOUBLE

    def __post_init__(self):
        object.__setattr__(self, 'alpha', validate_alpha(self.alpha))
        object.__setattr__(self, 'argument_precision', Precision(self.argument_precision))
        if int(self.sample_count) < 1:
            raise ValidationError(f'sample_count must be positive, got {self.sample_count}')


@dataclass(frozen=True)
class TruncatedModel:
    """
    Kernels n <= N_model (cube-free, increasing) and weights[i, r-1] = w(n_i, r).
    """
    kernels: np.ndarray
    weights: np.ndarray
    N_model: int
    R_model: int
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'kernels', _sealed(self.kernels, np.int64))
        weights = np.array(self.weights, dtype=np.float64).reshape(len(self.kernels), self.R_model)
        weights.flags.writeable = False
        object.__setattr__(self, 'weights', weights)
        if np.any(np.diff(self.kernels) <= 0):
            raise DomainError('model kernels must be strictly increasing')

    @property
    def size(self):
        return int(self.kernels.shape[0])

    def to_dict(self):
        return {
            'N': self.N_model,
            'R': self.R_model,
            'kernels': self.size,
            'provider': self.source.get('provider'),
        }


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    seed: int
    count: int

    def __post_init__(self):
        object.__setattr__(self, 'values', _sealed(self.values))


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray
    weights: Optional[np.ndarray] = None
    window: Optional[tuple] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise DomainError('samples must be one-dimensional')
        order = np.argsort(samples, kind='stable')
        object.__setattr__(self, 'samples', _sealed(samples[order]))
        if self.weights is not None:
            weights = np.asarray(self.weights, dtype=np.float64)[order]
            if np.any(weights < 0):
                raise DomainError('weights must be nonnegative')
            total = weights.sum()
            if total <= 0:
                raise DomainError('weights must have positive total')
            object.__setattr__(self, 'weights', _sealed(weights / total))

    @property
    def size(self):
        return int(self.samples.shape[0])

    def probabilities(self):
        if self.weights is None:
            return np.full(self.size, 1.0 / self.size)
        return self.weights

    def cdf(self, u):
        """Right-continuous CDF at u (scalar or array)."""
        cumulative = np.concatenate(([0.0], np.cumsum(self.probabilities())))
        index = np.searchsorted(self.samples, u, side='right')
        return np.minimum(cumulative[index], 1.0)

    def mean(self):
        return float(np.sum(self.probabilities() * self.samples))

    def std(self):
        p = self.probabilities()
        mu = np.sum(p * self.samples)
        return float(np.sqrt(np.sum(p * (self.samples - mu) ** 2)))

    def quantile(self, q):
        cumulative = np.cumsum(self.probabilities())
        index = np.searchsorted(cumulative, q, side='left')
        return self.samples[np.minimum(index, self.size - 1)]


@dataclass(frozen=True)
class DiagonalSystem:
    """
    Tuples (n_1..n_h, e_1..e_h) with sum e_j n_j^(1/3) = 0.

    ``indices`` and ``signs`` have shape (count, h); ``kernels`` and
    ``roots`` give the cube-free decomposition of each index.
    """
    h: int
    M: int
    indices: np.ndarray
    signs: np.ndarray
    kernels: np.ndarray
    roots: np.ndarray

    @property
    def count(self):
        return int(self.indices.shape[0])

    @property
    def solutions(self):
        return [tuple(int(n) for n in row) + tuple(int(s) for s in sign)
                for row, sign in zip(self.indices, self.signs)]

    def triples(self, i):
        """(kernel, r, sign) triples of the i-th solution."""
        return [(int(self.kernels[i, j]), int(self.roots[i, j]), int(self.signs[i, j]))
                for j in range(self.h)]


@dataclass(frozen=True)
class GapResult:
    m: int
    M: int
    min_gap: float
    bound: float
    witness: tuple

    @property
    def holds(self):
        return self.min_gap >= self.bound

    def __iter__(self):
        return iter((self.min_gap, self.bound, self.witness))

    def to_dict(self):
        return {'m': self.m, 'M': self.M, 'min_gap': self.min_gap,
                'bound': self.bound, 'witness': list(self.witness), 'holds': self.holds}


@dataclass(frozen=True)
class BoundCurves:
    T: float
    rate: float
    v_low: float
    v_high: float
    V_grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    constants: dict

    def to_dict(self):
        return {
            'T': self.T,
            'rate': self.rate,
            'v_range': [self.v_low, self.v_high],
            'envelope': [
                {'V': float(v), 'lower': float(lo), 'upper': float(up)}
                for v, lo, up in zip(self.V_grid, self.lower, self.upper)
            ],
            'constants': self.constants,
        }
