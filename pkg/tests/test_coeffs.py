import numpy as np
import pytest

from gl3lab.coeffs import (
    check_gl2_hecke,
    check_multiplicativity,
    hecke_consistency_check,
    lift_sym_square,
    load_coefficients,
    partial_sum_growth,
    ramanujan_tau_eigenvalues,
    rankin_selberg_constant,
    rankin_selberg_profile,
    save_coefficients,
    sieve_divisor3,
)
from gl3lab.models import Provider
from gl3lab.utils.modular import ramanujan_tau
from gl3lab.utils.number_theory import cubefree_decompose
from gl3lab.utils.validators import DimensionError, FormatError, ResourceError

from conftest import external_table

LAMBDA_2 = -24 / 2 ** 5.5


def test_divisor3_small_values(d3_small):
    assert d3_small.exact_values[1:].tolist() == [1, 3, 3, 6, 3, 9, 3, 10, 6, 9, 3, 18]
    assert d3_small.has_pole
    assert d3_small.provider is Provider.DIVISOR3
    assert d3_small.main_term.c2 == 0.5


def test_divisor3_length_one():
    table = sieve_divisor3(1)
    assert table.values[1:].tolist() == [1.0]


def test_table_is_read_only(d3_small):
    with pytest.raises(ValueError):
        d3_small.values[1] = 2.0


def test_divisor3_memory_guard(lab):
    lab.config['MEMORY_BUDGET_BYTES'] = 1000
    with pytest.raises(ResourceError):
        sieve_divisor3(10 ** 6)


def test_ramanujan_tau():
    assert ramanujan_tau(10) == [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
    assert ramanujan_tau(16)[15] == 987136


def test_sym_square_first_coefficients():
    table = lift_sym_square(ramanujan_tau_eigenvalues(100), 10)
    assert table.values[1] == pytest.approx(1.0)
    assert table.values[2] == pytest.approx(-0.71875, abs=1e-12)
    assert table.values[4] == pytest.approx(987136 / 2 ** 22 + 1, abs=1e-12)
    assert table.values[4] == pytest.approx(1.235352, abs=1e-6)
    assert table.metadata['lift_path'] == 'dense'
    assert not table.has_pole


def test_sym_square_dense_and_prime_paths_agree():
    dense = lift_sym_square(ramanujan_tau_eigenvalues(900, M=900), 30)
    prime = lift_sym_square(ramanujan_tau_eigenvalues(900, M=10), 30)
    assert dense.metadata['lift_path'] == 'dense'
    assert prime.metadata['lift_path'] == 'prime'
    np.testing.assert_allclose(dense.values, prime.values, atol=1e-12)


def test_sym_square_too_short():
    with pytest.raises(DimensionError) as exc:
        lift_sym_square(ramanujan_tau_eigenvalues(10, M=10), 50)
    assert '2500' in str(exc.value)


def test_gl2_hecke_relations():
    gl2 = ramanujan_tau_eigenvalues(200, M=200)
    assert gl2.values[2] == pytest.approx(LAMBDA_2)
    assert check_gl2_hecke(gl2, 200) < 1e-12


def test_load_coefficients(tmp_path):
    path = tmp_path / 'coeffs.txt'
    path.write_text('1 1.0\n2 -0.71875\n', encoding='utf-8')
    table = load_coefficients(path)
    assert table.length == 2
    assert table.values[2] == -0.71875
    assert any('header' in w for w in table.warnings)


@pytest.mark.parametrize('text, message', [
    ('', 'no coefficient records'),
    ('2 1.0\n3 2.0\n', 'index must start at 1'),
    ('1 1.0\n3 2.0\n', 'non-contiguous'),
    ('1 one\n', 'cannot parse'),
])
def test_load_coefficients_errors(tmp_path, text, message):
    path = tmp_path / 'bad.txt'
    path.write_text(text, encoding='utf-8')
    with pytest.raises(FormatError) as exc:
        load_coefficients(path)
    assert message in str(exc.value)


def test_save_then_load_keeps_header(tmp_path, d3_small):
    path = tmp_path / 'd3.txt'
    save_coefficients(d3_small, path)
    table = load_coefficients(path)
    assert table.values[1:].tolist() == d3_small.values[1:].tolist()
    assert table.warnings == ()


@pytest.mark.parametrize('n, expected', [(1, (1, 1)), (24, (3, 2)), (7, (7, 1)), (16, (2, 2))])
def test_cubefree_decompose(n, expected):
    assert cubefree_decompose(n) == expected


def test_hecke_sym_square(sym2_table):
    report = hecke_consistency_check(sym2_table, 100)
    assert report.passed
    for identity in ('row_hecke', 'hecke_product', 'recursive_vs_direct'):
        assert report.violation(identity) <= 1e-9


def test_hecke_divisor3_exact(d3_table):
    report = hecke_consistency_check(d3_table, 40)
    assert report.passed
    assert report.violation('hecke_product') == 0.0


def test_hecke_detects_corruption(sym2_table):
    values = sym2_table.values[1:101].copy()
    values[5] += 0.1
    report = hecke_consistency_check(external_table(values), 20)
    assert report.violation('row_hecke') > 1e-3
    assert report.identities[0]['passed'] is None


def test_multiplicativity(d3_table):
    assert check_multiplicativity(d3_table, 44) == 0


def test_rankin_selberg_profile(d3_table):
    profile = rankin_selberg_profile(d3_table)
    assert profile['checkpoints'][-1] == 2000
    assert profile['constant'] >= max(profile['ratios'])


def test_rankin_selberg_constant():
    assert rankin_selberg_constant(np.array([0.0, 1.0, 1.0])) == pytest.approx(1.0)
    assert rankin_selberg_constant(np.array([0.0, 2.0, 0.0])) == pytest.approx(4.0)


def test_partial_sum_growth(d3_table):
    growth = partial_sum_growth(d3_table, n_max=10)
    assert 8 not in growth['per_kernel']
    assert growth['constant'] > 0
