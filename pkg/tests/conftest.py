import numpy as np
import pytest

from gl3lab import create_lab
from gl3lab.coeffs import lift_sym_square, ramanujan_tau_eigenvalues, sieve_divisor3
from gl3lab.models import CoefficientTable, Provider

MINIMAL_EXPERIMENT = """
[provider]
name = divisor3

[table]
N = 2000

[window]
T = 100
count = 200
seed = 1

[model]
N_model = 8
R_model = 2
draws = 2000
seed = 2
"""


@pytest.fixture(autouse=True)
def lab():
    """Lab built from the testing configuration."""
    return create_lab('config.TestingConfig')


@pytest.fixture
def d3_small(lab):
    return sieve_divisor3(12)


@pytest.fixture
def d3_table(lab):
    return sieve_divisor3(2000)


@pytest.fixture
def sym2_table(lab):
    return lift_sym_square(ramanujan_tau_eigenvalues(100), 100)


def external_table(values):
    """Pole-free table with a(n) = values[n-1]."""
    padded = np.zeros(len(values) + 1)
    padded[1:] = values
    return CoefficientTable(values=padded, provider=Provider.EXTERNAL)


@pytest.fixture
def unit_table(lab):
    return external_table([1.0])


@pytest.fixture
def report_dir(tmp_path):
    path = tmp_path / 'reports'
    path.mkdir()
    return path


@pytest.fixture
def experiment_file(tmp_path):
    def write(text=MINIMAL_EXPERIMENT, extra=''):
        path = tmp_path / 'experiment.cfg'
        path.write_text(text + extra, encoding='utf-8')
        return path
    return write
