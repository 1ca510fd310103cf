import math

import numpy as np
import pytest

from gl3lab.coeffs import sieve_divisor3
from gl3lab.moments import (
    diagonal_solutions,
    gap_bound,
    gap_trend,
    lemma62_min_gap,
    lemma63_report,
    model_moment_exact,
    off_diagonal_bound,
    time_average_power,
)
from gl3lab.random_model import build_model, model_coefficients
from gl3lab.utils.validators import DomainError, ResourceError


def test_pairs_cancel_only_against_themselves():
    system = diagonal_solutions(2, 5)
    assert system.count == 10
    for n1, n2, e1, e2 in system.solutions:
        assert n1 == n2 and e1 == -e2


def test_solutions_are_lexicographic():
    system = diagonal_solutions(2, 2)
    assert system.solutions == [(1, 1, 1, -1), (1, 1, -1, 1), (2, 2, 1, -1), (2, 2, -1, 1)]


def test_cubes_combine_within_a_kernel():
    system = diagonal_solutions(3, 27)
    # 3 = 2 + 1 on kernel 1
    assert (27, 1, 8, 1, -1, -1) in system.solutions
    index = system.solutions.index((27, 1, 8, 1, -1, -1))
    assert system.triples(index) == [(1, 3, 1), (1, 1, -1), (1, 2, -1)]


def test_no_odd_solutions_among_distinct_kernels():
    assert diagonal_solutions(3, 7).count == 0
    assert diagonal_solutions(1, 10).count == 0


def test_enumeration_guard(lab):
    with pytest.raises(ResourceError):
        diagonal_solutions(9, 2)
    with pytest.raises(ResourceError):
        diagonal_solutions(4, 64)


def _cube_coefficients():
    coeffs = np.zeros(27)
    coeffs[[0, 7, 26]] = 1.0
    return coeffs


@pytest.mark.parametrize('method', ['kernel', 'diagonal'])
def test_model_moment_on_cubes(method):
    # a = 1 at 1, 8, 27: E (cos X' + cos 2X' + cos 3X')^3 with X' = 6 pi X
    assert model_moment_exact(_cube_coefficients(), 3, method=method) == pytest.approx(2.25)


@pytest.mark.parametrize('h', [1, 2, 3, 4])
def test_kernel_and_diagonal_agree(h):
    coeffs = np.array([0.7, -0.4, 0.2, 0.0, 0.5, 0.3, 0.1, 0.9])
    assert model_moment_exact(coeffs, h) == pytest.approx(
        model_moment_exact(coeffs, h, method='diagonal'), rel=1e-12, abs=1e-14)


def test_second_moment_is_half_sum_of_squares():
    coeffs = np.array([0.5, -1.0, 2.0, 0.25])
    assert model_moment_exact(coeffs, 2) == pytest.approx(0.5 * np.sum(coeffs ** 2))


def test_model_moment_errors():
    with pytest.raises(DomainError):
        model_moment_exact([], 2)
    with pytest.raises(DomainError):
        model_moment_exact([1.0], 2, method='other')


def test_gap_single_term():
    assert tuple(lemma62_min_gap(1, 5))[:2] == (1.0, 1.0)


def test_gap_two_terms():
    result = lemma62_min_gap(2, 9)
    assert result.min_gap == pytest.approx(9 ** (1 / 3) - 2, rel=1e-12)
    assert result.min_gap == pytest.approx(0.080084, abs=1e-6)
    assert result.bound == pytest.approx(gap_bound(2, 9))
    assert result.bound == pytest.approx(0.057780, abs=1e-6)
    assert set(result.witness[:2]) == {8, 9}
    assert result.holds
    assert result.to_dict()['holds']


def test_gap_guard(lab):
    with pytest.raises(ResourceError):
        lemma62_min_gap(5, 4)
    with pytest.raises(ResourceError):
        lemma62_min_gap(2, 17)


def test_time_average_single_term():
    average = time_average_power([1.0], 1.0, 2, 1e6)
    assert average == pytest.approx(0.5, abs=1e-2)


def test_time_average_first_power_vanishes():
    assert abs(time_average_power([1.0, 0.5], 1.0, 1, 1e6)) < 1e-2


def test_time_average_ignores_sign_of_frequency():
    coeffs = [1.0, 0.5, 0.25]
    assert time_average_power(coeffs, -2.0, 3, 1e5) == time_average_power(coeffs, 2.0, 3, 1e5)


def test_time_average_zero_coefficients():
    assert time_average_power([0.0, 0.0], 1.0, 2, 1e4) == 0.0
    with pytest.raises(DomainError):
        time_average_power([1.0], 0.0, 2, 1e4)


def test_time_average_quadrature_fallback(lab):
    coeffs = [1.0, 0.5]
    exact = time_average_power(coeffs, 1.0, 3, 1e3)
    lab.config['TRIG_EXPANSION_MAX_TERMS'] = 10
    assert time_average_power(coeffs, 1.0, 3, 1e3) == pytest.approx(exact, rel=1e-6, abs=1e-8)
    with pytest.raises(ResourceError):
        time_average_power(coeffs, 1.0, 3, 1e3, fallback=False)


def test_off_diagonal_bound_covers_gap():
    coeffs = [1.0, 0.5, 0.3]
    average = time_average_power(coeffs, 1.0, 2, 1e4)
    gap = abs(average - model_moment_exact(coeffs, 2))
    assert gap <= off_diagonal_bound(coeffs, 1.0, 2, 1e4)


def test_lemma63_report_gap_shrinks():
    coeffs = np.array([1.0, 0.5, 0.3, 0.2])
    rows = lemma63_report(coeffs, 2, [1e4, 1e6, 1e8])
    assert [row['T'] for row in rows] == [1e4, 1e6, 1e8]
    assert all(row['model_moment'] == pytest.approx(0.5 * np.sum(coeffs ** 2)) for row in rows)
    for row in rows:
        assert row['gap'] <= row['bound_T_minus_2_9']
        assert row['bound_T_minus_2_9'] == pytest.approx(5 * row['T'] ** (-2 / 9))
        assert row['gap'] <= row['off_diagonal_bound']
    assert rows[-1]['off_diagonal_bound'] < rows[0]['off_diagonal_bound']


def test_lemma63_report_on_cubes():
    rows = lemma63_report(_cube_coefficients(), 3, [1e6])
    assert rows[0]['model_moment'] == pytest.approx(2.25)
    assert math.isfinite(rows[0]['time_average'])


@pytest.mark.parametrize('m', [2, 3, 4])
def test_gap_bound_holds_up_to_twelve(m):
    for M in range(1, 13):
        result = lemma62_min_gap(m, M)
        assert result.holds, (m, M)
        assert result.min_gap > 0


def _d3_model_coefficients(M):
    # a_1..a_10 need kernels up to 10 and the harmonic r = 2 for a_8
    return model_coefficients(build_model(sieve_divisor3(80), 10, 2))[:M]


def test_near_resonance_among_four_terms():
    value = 2 ** (1 / 3) + 8 ** (1 / 3) - 3 ** (1 / 3) - 6 ** (1 / 3)
    assert 5e-4 < value < 6e-4
    assert lemma62_min_gap(4, 10).min_gap <= value + 1e-12


def test_time_average_gaps_on_d3_model():
    coeffs = _d3_model_coefficients(10)
    rows = [row for h in (1, 2, 3, 4) for row in lemma63_report(coeffs, h, [1e4, 1e6, 1e8])]
    trend = gap_trend(rows)
    assert sorted(trend) == [1, 2, 3, 4]
    for h in (1, 2, 3):
        assert trend[h]['nonincreasing'], h
    for h in (1, 2, 3, 4):
        assert trend[h]['within_bound'], h
    # the near resonance at h = 4 makes the gap grow with T
    assert not trend[4]['nonincreasing']


def test_gap_trend_flags():
    rows = [
        {'h': 2, 'T': 1e6, 'gap': 0.01, 'bound_T_minus_2_9': 0.2},
        {'h': 2, 'T': 1e4, 'gap': 0.05, 'bound_T_minus_2_9': 0.6},
        {'h': 3, 'T': 1e4, 'gap': 0.01, 'bound_T_minus_2_9': 0.6},
        {'h': 3, 'T': 1e6, 'gap': 0.3, 'bound_T_minus_2_9': 0.2},
    ]
    assert gap_trend(rows) == {
        2: {'nonincreasing': True, 'within_bound': True},
        3: {'nonincreasing': False, 'within_bound': False},
    }
