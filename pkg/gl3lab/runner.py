"""
Experiment orchestration: table, series and model stages, then the enabled
pipelines, with a manifest written on every exit path.
"""
import logging
import os

from gl3lab import current_lab
from gl3lab.coeffs import lift_sym_square, load_coefficients, ramanujan_tau_eigenvalues, sieve_divisor3
from gl3lab.empirics import empirical_distribution, window_evaluator
from gl3lab.error_term import build_series, normalized_F
from gl3lab.experiment import validate_experiment
from gl3lab.models import Provider
from gl3lab.random_model import build_model, sample_batch
from gl3lab.utils.reports import ReportWriter
from gl3lab.utils.validators import LabError, ValidationError
from gl3lab.voronoi import voronoi_F

logger = logging.getLogger(__name__)


def build_table(cfg):
    """
    Coefficient table for the configured provider.

    Returns:
        tuple: (CoefficientTable, GL2Eigenvalues or None)
    """
    provider = Provider(cfg.provider)
    if provider is Provider.DIVISOR3:
        return sieve_divisor3(cfg.N), None
    if provider is Provider.SYM_SQUARE:
        dense = min(cfg.N, current_lab().config['SYM_SQUARE_DENSE_MAX_N'])
        gl2 = ramanujan_tau_eigenvalues(cfg.N, M=dense)
        return lift_sym_square(gl2, cfg.N), gl2
    table = load_coefficients(cfg.provider_params['path'])
    if table.length < cfg.N:
        logger.warning(f'External table has {table.length} coefficients, fewer than N={cfg.N}')
    return table, None


class RunContext:
    """Shared state of one run; stages fill it in order."""

    def __init__(self, config):
        self.config = config
        self.logger = current_lab().logger
        self.table = None
        self.gl2 = None
        self.series = None
        self.model = None
        self._batch = None
        self._windows = {}

    def batch(self):
        if self._batch is None:
            self._batch = sample_batch(self.model, self.config.model.seed, self.config.model.draws)
        return self._batch

    def evaluator(self):
        mode = self.config.window.mode
        if mode == 'exact':
            return lambda t: normalized_F(self.series, t)
        if mode == 'voronoi':
            return lambda t: voronoi_F(self.table, t, self.config.voronoi)
        return window_evaluator(self.series, self.table, self.config.voronoi)

    def window_distribution(self, T):
        if T not in self._windows:
            window = self.config.window
            self._windows[T] = empirical_distribution(
                self.evaluator(), T, window.count, window.strategy, window.seed)
        return self._windows[T]


def _needs(pipelines):
    return {need for pipeline in pipelines for need in pipeline.needs}


def run_experiment(cfg, out_dir=None):
    """
    Validate and run an experiment.

    Args:
        cfg: ExperimentConfig
        out_dir: Report directory, defaults to the config's outputs entry

    Returns:
        int: Exit status, 0 on success, the error's exit code otherwise
    """
    from gl3lab.pipelines import all_pipelines

    out_dir = out_dir or cfg.outputs or current_lab().config['OUTPUT_DIR']
    os.makedirs(out_dir, exist_ok=True)
    writer = ReportWriter(out_dir, cfg.source_text, cfg.seeds)

    diagnostics = validate_experiment(cfg)
    if diagnostics:
        error = ValidationError('; '.join(diagnostics))
        writer.manifest('invalid', error)
        return error.exit_code

    enabled = [p for p in all_pipelines if cfg.pipelines.get(p.name)]
    needs = _needs(enabled)
    context = RunContext(cfg)
    try:
        if needs:
            with writer.stage('sieve'):
                context.table, context.gl2 = build_table(cfg)
        if needs & {'series'}:
            with writer.stage('series'):
                context.series = build_series(context.table)
        if needs & {'model'}:
            with writer.stage('model'):
                context.model = build_model(context.table, cfg.model.N_model, cfg.model.R_model)
        for pipeline in enabled:
            with writer.stage(pipeline.name):
                pipeline(context, writer)
    except LabError as e:
        context.logger.error(f'Run failed: {e}', exc_info=True)
        writer.manifest('failed', e)
        return e.exit_code
    except Exception as e:
        context.logger.error(f'Unexpected failure: {e}', exc_info=True)
        writer.manifest('failed', e)
        return 1

    writer.manifest('ok')
    return 0
