import math

import numpy as np
import pytest
from scipy import integrate

from gl3lab.empirics import (
    berry_esseen_bound,
    bound_curves,
    cdf_table,
    density_estimate,
    discrepancy_rate,
    empirical_characteristic_function,
    empirical_distribution,
    ks_distance,
    silverman_bandwidth,
    tail_probability,
    wilson_interval,
    window_evaluator,
    window_points,
)
from gl3lab.error_term import build_series, normalized_F
from gl3lab.models import EmpiricalDistribution
from gl3lab.utils.validators import DomainError, RangeError, ValidationError
from gl3lab.voronoi import voronoi_F


def dist(*samples):
    return EmpiricalDistribution(samples=np.array(samples, dtype=np.float64))


def test_grid_points():
    np.testing.assert_allclose(window_points(100.0, 2), [125.0, 175.0])


def test_uniform_points_are_seeded():
    first = window_points(100.0, 500, 'uniform', seed=4)
    np.testing.assert_array_equal(first, window_points(100.0, 500, 'uniform', seed=4))
    assert not np.array_equal(first, window_points(100.0, 500, 'uniform', seed=5))
    assert first.min() >= 100.0 and first.max() < 200.0


def test_window_point_errors():
    with pytest.raises(DomainError):
        window_points(100.0, 10, 'uniform')
    with pytest.raises(ValidationError):
        window_points(100.0, 10, 'sobol')


def test_constant_evaluator():
    result = empirical_distribution(lambda t: 0.0, 100.0, 50)
    assert result.size == 50
    assert result.window == (100.0, 200.0)
    assert result.mean() == 0.0
    assert tail_probability(result, -1.0) == pytest.approx(1.0)


def test_distribution_is_sorted_and_weighted():
    weighted = EmpiricalDistribution(samples=np.array([3.0, 1.0, 2.0]), weights=np.array([1.0, 1.0, 2.0]))
    assert weighted.samples.tolist() == [1.0, 2.0, 3.0]
    np.testing.assert_allclose(weighted.probabilities(), [0.25, 0.5, 0.25])
    assert weighted.mean() == pytest.approx(2.0)
    with pytest.raises(DomainError):
        EmpiricalDistribution(samples=np.array([1.0]), weights=np.array([-1.0]))


def test_window_evaluator_switches_to_voronoi(d3_table):
    series = build_series(d3_table)
    evaluate = window_evaluator(series, d3_table)
    inside = window_points(500.0, 20)
    np.testing.assert_array_equal(evaluate(inside), normalized_F(series, inside))
    beyond = window_points(1500.0, 20)
    np.testing.assert_allclose(evaluate(beyond), voronoi_F(d3_table, beyond))


def test_range_error_names_window(unit_table):
    evaluate = window_evaluator(build_series(unit_table), unit_table)
    with pytest.raises(RangeError) as exc:
        empirical_distribution(evaluate, 1e5, 10)
    assert 'window [100000.0, 200000.0]' in str(exc.value)
    assert exc.value.required is not None


def test_ks_distance_examples():
    assert ks_distance(dist(0.0, 1.0), dist(0.5)) == pytest.approx(0.5)
    assert ks_distance(dist(0.0, 1.0), dist(0.0, 1.0)) == 0.0
    assert ks_distance(dist(0.0, 0.5), dist(1.0, 2.0)) == 1.0


def test_ks_distance_checks_left_limits():
    # CDFs cross inside the atom at 1: 1/3 vs 1/2 before, 1 vs 1/2 after
    assert ks_distance(dist(0.0, 1.0, 1.0), dist(0.0, 2.0)) == pytest.approx(0.5)


def test_ks_distance_empty():
    with pytest.raises(DomainError):
        ks_distance(EmpiricalDistribution(samples=np.zeros(0)), dist(1.0))


def test_density_is_symmetric_with_unit_mass():
    grid = np.linspace(-5.0, 5.0, 1001)
    density = np.array([g for _, g in density_estimate(dist(-1.0, 1.0), 0.5, grid)])
    np.testing.assert_allclose(density, density[::-1], atol=1e-12)
    assert integrate.trapezoid(density, grid) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        density_estimate(dist(0.0), 0.0, grid)


def test_silverman_bandwidth_positive():
    samples = np.random.default_rng(3).normal(size=2000)
    bandwidth = silverman_bandwidth(EmpiricalDistribution(samples=samples))
    assert 0.1 < bandwidth < 0.5


def test_tail_probability():
    sample = dist(-2.0, -1.0, 1.0, 2.0)
    assert tail_probability(sample, -5.0, 'above') == 1.0
    assert tail_probability(sample, 5.0, 'above') == 0.0
    assert tail_probability(sample, 1.0, 'above') == 0.25
    assert tail_probability(sample, 1.5, 'below') == 0.25


def test_wilson_interval():
    low, high = wilson_interval(5, 100)
    assert low < 0.05 < high
    low, high = wilson_interval(0, 10)
    assert low == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        wilson_interval(0, 0)


def test_discrepancy_rate_values():
    rates = [discrepancy_rate(T) for T in (1e6, 1e8, 1e10)]
    assert rates == pytest.approx([0.6835, 0.7829, 0.8538], abs=1e-3)
    # the formula only turns down once log log T exceeds e^5
    assert rates == sorted(rates)
    with pytest.raises(DomainError):
        discrepancy_rate(10.0)


def test_bound_curves():
    curves = bound_curves(1e8, [1.0, 1.5, 2.0], 0.01, 0.01)
    assert curves.rate == discrepancy_rate(1e8)
    assert curves.v_low == 1.0
    assert np.all(curves.lower <= curves.upper)
    assert curves.constants['b3'] == 1.0
    scaled = bound_curves(1e8, [1.0], 0.0, 0.0, {'b2': 2.0})
    assert scaled.v_high == pytest.approx(2 * curves.v_high)
    assert scaled.to_dict()['envelope'][0]['V'] == 1.0


def test_empirical_characteristic_function():
    phi = empirical_characteristic_function(dist(-1.0, 1.0))
    assert phi(0.0) == 1.0
    np.testing.assert_allclose(phi(np.array([1.0, 2.0])), [math.cos(1.0), math.cos(2.0)], atol=1e-15)


def test_berry_esseen_identical():
    phi = empirical_characteristic_function(dist(0.0, 1.0))
    assert berry_esseen_bound(phi, phi, 5.0, 200) == pytest.approx(0.2)


def test_berry_esseen_linear_difference():
    R = 3.0
    bound = berry_esseen_bound(lambda a: np.asarray(a, dtype=np.complex128),
                               lambda a: np.zeros(np.shape(a), dtype=np.complex128), R, 100)
    assert bound == pytest.approx(1 / R + 2 * R)


def test_berry_esseen_scalar_charfn():
    bound = berry_esseen_bound(lambda a: complex(1.0, 0.0), lambda a: complex(1.0, 0.0), 2.0, 10)
    assert bound == pytest.approx(0.5)


def test_cdf_table():
    rows = cdf_table(dist(0.0, 1.0), dist(0.5), [0.0, 0.75])
    np.testing.assert_allclose(rows, [[0.0, 0.5, 0.0], [0.75, 0.5, 1.0]])
