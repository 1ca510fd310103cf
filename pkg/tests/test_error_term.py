import math

import numpy as np
import pytest

from gl3lab.coeffs import lift_sym_square, ramanujan_tau_eigenvalues, sieve_divisor3
from gl3lab.error_term import (
    D3_C0,
    D3_C1,
    EULER_GAMMA,
    build_series,
    delta_at,
    derive_main_term_d3,
    main_term_d3_coefficients,
    main_term_residuals,
    mean_square_integral,
    mean_square_profile,
    normalized_F,
    series_constant,
)
from gl3lab.utils.validators import DomainError, RangeError

from conftest import external_table


@pytest.fixture
def sym2_series():
    return build_series(lift_sym_square(ramanujan_tau_eigenvalues(100), 10))


def test_prefix_sums_d3():
    series = build_series(sieve_divisor3(10))
    assert series.prefix[10] == 53
    assert series.has_pole


def test_prefix_sums_zero_table():
    series = build_series(external_table([0.0] * 5))
    assert not np.any(series.prefix)


def test_delta_d3_subtracts_main_term():
    table = sieve_divisor3(12)
    series = build_series(table)
    assert delta_at(series, 10.5) == pytest.approx(53 - table.main_term(10.5), rel=1e-14)


def test_delta_sym_square(sym2_series):
    assert sym2_series.prefix[2] == pytest.approx(0.28125)
    assert delta_at(sym2_series, 2.5) == pytest.approx(0.28125)
    assert normalized_F(sym2_series, 2.5) == pytest.approx(0.28125 * 2.5 ** (-1 / 3))
    assert normalized_F(sym2_series, 2.5) == pytest.approx(0.2072268, abs=1e-7)


def test_delta_below_one_is_empty(unit_table):
    assert delta_at(build_series(unit_table), 0.5) == 0.0


def test_delta_vectorized(sym2_series):
    values = delta_at(sym2_series, np.array([1.5, 2.5]))
    np.testing.assert_allclose(values, [1.0, 0.28125])


def test_delta_domain_and_range(sym2_series):
    with pytest.raises(DomainError):
        delta_at(sym2_series, 0.0)
    with pytest.raises(RangeError) as exc:
        delta_at(sym2_series, 11.0)
    assert exc.value.required == 11
    with pytest.raises(DomainError):
        normalized_F(sym2_series, 0.5)


def test_main_term_coefficients():
    c2, c1, c0 = main_term_d3_coefficients()
    assert c2 == 0.5
    assert c1 == pytest.approx(3 * EULER_GAMMA - 1)
    assert (c1, c0) == (D3_C1, D3_C0)


def test_main_term_matches_symbolic_derivation():
    derived = derive_main_term_d3()
    np.testing.assert_allclose(derived, main_term_d3_coefficients(), rtol=1e-12, atol=1e-14)


def test_main_term_residuals_small(d3_table):
    residuals = main_term_residuals(build_series(d3_table), [500.0, 1000.0, 2000.0])
    assert np.all(np.abs(residuals) < 0.5)


def test_mean_square_unit_table():
    series = build_series(external_table([1.0, 0.0, 0.0]))
    integral, predicted, ratio = mean_square_integral(series, 3)
    assert integral == pytest.approx(2.0)
    assert ratio == pytest.approx(integral / predicted)


def test_mean_square_zero_table():
    series = build_series(external_table([0.0] * 4))
    assert mean_square_integral(series, 4).integral == 0.0


def test_mean_square_fractional_point():
    series = build_series(external_table([1.0, 1.0, 0.0]))
    # [1,2): 1, [2,2.5]: 4 * 0.5
    assert mean_square_integral(series, 2.5).integral == pytest.approx(3.0)


def test_mean_square_profile_increasing(d3_table):
    results = mean_square_profile(build_series(d3_table), [100.0, 1000.0, 2000.0])
    assert [r.x for r in results] == [100.0, 1000.0, 2000.0]
    integrals = [r.integral for r in results]
    assert integrals == sorted(integrals)
    assert all(r.integral > 0 for r in results)


def test_series_constant():
    assert series_constant(external_table([1.0, 0.0]), 2).value == 1.0
    d3 = sieve_divisor3(10 ** 4)
    value = series_constant(d3, 2)
    assert value.value == pytest.approx(1 + 9 / 2 ** (4 / 3))
    assert value.tail_bound == pytest.approx(3 * d3.rankin_selberg_constant * 2 ** (-1 / 3))
    assert series_constant(d3, 1000).value <= series_constant(d3, 10 ** 4).value


def test_series_constant_beyond_table(unit_table):
    with pytest.raises(RangeError):
        series_constant(unit_table, 2)


def test_series_constant_unit(unit_table):
    assert math.isclose(series_constant(unit_table, 1).value, 1.0)


@pytest.mark.slow
def test_mean_square_ratio_sym_square():
    N = 10 ** 6
    series = build_series(lift_sym_square(ramanujan_tau_eigenvalues(N, M=10 ** 4), N))
    early, final = mean_square_profile(series, [1e4, 1e6])
    assert abs(final.ratio - 1) <= abs(early.ratio - 1)
    assert abs(final.ratio - 1) <= 0.25
