import json
import os

import pytest

from gl3lab import create_lab
from gl3lab.error_term import build_series
from gl3lab.experiment import PIPELINE_NAMES, load_experiment, parse_experiment
from gl3lab.runner import RunContext, build_table, run_experiment

from conftest import MINIMAL_EXPERIMENT

ALL_PIPELINES = '\n[pipelines]\n' + ''.join(f'{name} = yes\n' for name in PIPELINE_NAMES)
SMALL_RUN = '''
[pipelines]
meansquare = yes
moments = yes

[moments]
h = 2, 3
T = 1e4, 1e6
gap_m = 2
gap_M = 6
'''


def _manifest(out_dir):
    with open(os.path.join(out_dir, 'manifest.json'), encoding='utf-8') as f:
        return json.load(f)


def test_all_toggles_off_writes_only_manifest(report_dir):
    assert run_experiment(parse_experiment(MINIMAL_EXPERIMENT), str(report_dir)) == 0
    assert os.listdir(report_dir) == ['manifest.json']
    manifest = _manifest(report_dir)
    assert manifest['status'] == 'ok'
    assert manifest['completed_stages'] == []
    assert manifest['seeds'] == {'model': 2, 'window': 1}
    assert len(manifest['config_sha256']) == 64


def test_invalid_config_writes_invalid_manifest(report_dir):
    cfg = parse_experiment(MINIMAL_EXPERIMENT.replace('N_model = 8', 'N_model = 1000'))
    assert run_experiment(cfg, str(report_dir)) == 2
    manifest = _manifest(report_dir)
    assert manifest['status'] == 'invalid'
    assert manifest['error']['type'] == 'ValidationError'
    assert 'N_model' in manifest['error']['message']


def test_failure_writes_failed_manifest(report_dir, tmp_path):
    bad = tmp_path / 'bad.txt'
    bad.write_text('1 one\n', encoding='utf-8')
    text = MINIMAL_EXPERIMENT.replace('name = divisor3', f'name = external\npath = {bad}')
    cfg = parse_experiment(text + '\n[pipelines]\nhecke = yes\n')
    assert run_experiment(cfg, str(report_dir)) == 2
    manifest = _manifest(report_dir)
    assert manifest['status'] == 'failed'
    assert manifest['error']['type'] == 'FormatError'
    assert 'sieve' not in manifest['completed_stages']


def test_small_run_is_deterministic(tmp_path):
    cfg = parse_experiment(MINIMAL_EXPERIMENT + SMALL_RUN)
    first, second = tmp_path / 'first', tmp_path / 'second'
    assert run_experiment(cfg, str(first)) == 0
    assert run_experiment(cfg, str(second)) == 0
    for name in ('meansquare.csv', 'meansquare.json', 'moments_time_average.csv', 'gaps.csv', 'moments.json'):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    manifest = _manifest(first)
    assert manifest['completed_stages'] == ['sieve', 'series', 'model', 'meansquare', 'moments']
    assert 'moments.json' in manifest['files']


def test_small_run_reports(tmp_path):
    cfg = parse_experiment(MINIMAL_EXPERIMENT + SMALL_RUN)
    assert run_experiment(cfg, str(tmp_path)) == 0
    with open(tmp_path / 'meansquare.json', encoding='utf-8') as f:
        meansquare = json.load(f)
    assert meansquare['recorded']['label'] == 'analogue'
    assert set(meansquare['asserted']) == {'scale', 'exponent'}
    with open(tmp_path / 'moments.json', encoding='utf-8') as f:
        moments = json.load(f)['recorded']
    assert moments['gaps_hold']
    assert moments['exact_second_moment'] == pytest.approx(moments['model_moment_h2'], rel=1e-12)
    lines = (tmp_path / 'moments_time_average.csv').read_text(encoding='utf-8').splitlines()
    assert lines[0].startswith('h,M,T,time_average')
    assert len(lines) == 1 + 2 * 2


def test_every_pipeline_runs(tmp_path):
    cfg = parse_experiment(MINIMAL_EXPERIMENT + ALL_PIPELINES)
    assert run_experiment(cfg, str(tmp_path)) == 0
    manifest = _manifest(tmp_path)
    assert manifest['completed_stages'][3:] == list(PIPELINE_NAMES)
    for name in ('hecke.json', 'voronoi_errors.csv', 'voronoi_grid.csv', 'lemma51.csv', 'discrepancy.csv',
                 'cdf_T100.csv', 'density_T100.csv', 'tails.csv', 'laplace.json'):
        assert (tmp_path / name).exists(), name
    with open(tmp_path / 'discrepancy.json', encoding='utf-8') as f:
        rows = json.load(f)['recorded']['rows']
    assert 0 <= rows[0]['ks'] <= 1


def test_build_table_sym_square(lab):
    text = MINIMAL_EXPERIMENT.replace('name = divisor3', 'name = sym_square').replace('N = 2000', 'N = 100')
    table, gl2 = build_table(parse_experiment(text))
    assert table.length == 100
    assert table.metadata['lift_path'] == 'prime'
    assert gl2.prime_bound >= 100


def test_context_modes(d3_table):
    cfg = parse_experiment(MINIMAL_EXPERIMENT.replace('count = 200', 'count = 20\nmode = exact'))
    context = RunContext(cfg)
    context.table = d3_table
    context.series = build_series(d3_table)
    first = context.window_distribution(100.0)
    assert context.window_distribution(100.0) is first
    assert first.size == 20


SMOKE_CONFIG = os.path.join(os.path.dirname(__file__), '..', 'configs', 'd3-smoke.cfg')


@pytest.fixture(scope='module')
def smoke_runs(tmp_path_factory):
    """The bundled d3 smoke config, run twice into separate directories."""
    create_lab('config.Config')
    cfg = load_experiment(SMOKE_CONFIG)
    outs = [tmp_path_factory.mktemp('smoke_first'), tmp_path_factory.mktemp('smoke_second')]
    statuses = [run_experiment(cfg, str(out)) for out in outs]
    return cfg, statuses, outs


def _report(out_dir, name):
    with open(os.path.join(out_dir, name), encoding='utf-8') as f:
        return json.load(f)['recorded']


@pytest.mark.slow
def test_smoke_config_runs(smoke_runs):
    cfg, statuses, outs = smoke_runs
    assert cfg.diagnostics == []
    assert statuses == [0, 0]
    assert _manifest(outs[0])['status'] == 'ok'
    assert _manifest(outs[0])['completed_stages'][3:] == list(PIPELINE_NAMES)


@pytest.mark.slow
def test_smoke_reports_are_reproducible(smoke_runs):
    _, _, (first, second) = smoke_runs
    names = sorted(name for name in os.listdir(first) if name != 'manifest.json')
    assert names == sorted(name for name in os.listdir(second) if name != 'manifest.json')
    assert any(name.endswith('.csv') for name in names)
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


@pytest.mark.slow
def test_smoke_discrepancy(smoke_runs):
    rows = _report(smoke_runs[2][0], 'discrepancy.json')['rows']
    assert [row['T'] for row in rows] == [1e4, 1e5, 1e6]
    assert rows[-1]['ks'] <= rows[0]['ks']
    assert rows[-1]['ks'] <= 0.1
    for row in rows:
        assert row['berry_esseen_bound'] >= row['ks']


@pytest.mark.slow
def test_smoke_moments(smoke_runs):
    moments = _report(smoke_runs[2][0], 'moments.json')
    assert moments['gaps_hold']
    assert all(flags['within_bound'] for flags in moments['gap_trend'].values())
    for h in ('1', '2', '3'):
        assert moments['gap_trend'][h]['nonincreasing']
    assert not moments['gap_trend']['4']['nonincreasing']
    assert moments['nearest_frequencies']['4']['min_gap'] < 6e-4
    assert moments['exact_second_moment'] == pytest.approx(moments['model_moment_h2'], rel=1e-12)


@pytest.mark.slow
def test_smoke_laplace_and_lemma51(smoke_runs):
    out = smoke_runs[2][0]
    assert _report(out, 'laplace.json')['within_envelope']
    lemma51 = _report(out, 'lemma51.json')
    assert lemma51['max_abs_mean'] <= 1e-12
    assert lemma51['sup_constant'] <= 30.0


@pytest.mark.slow
def test_smoke_voronoi_errors(smoke_runs):
    voronoi = _report(smoke_runs[2][0], 'voronoi.json')
    assert [row['alpha'] for row in voronoi['alphas']] == [0.55, 0.65]
    for row in voronoi['alphas']:
        assert row['fitted_C'] <= 4.5
    assert not voronoi['median_decreases_with_alpha']
