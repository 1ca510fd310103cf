import os
import sys

import click

from gl3lab import create_lab, current_lab
from gl3lab.utils.validators import LabError


def _load(config_path, seed_override, allow_seed_override):
    from gl3lab.experiment import load_experiment

    cfg = load_experiment(config_path)
    if seed_override is not None:
        if not allow_seed_override:
            raise click.UsageError('--seed-override is refused without --allow-seed-override')
        current_lab().logger.warning(f'Seeds in {config_path} overridden with {seed_override}')
        cfg = cfg.with_seed(seed_override)
    return cfg


def _fail(error):
    """Print a lab error and exit with its code."""
    click.echo(f'Error: {error}', err=True)
    sys.exit(error.exit_code)


def _run_only(ctx, config_path, out, seed_override, allow_seed_override, *names):
    from gl3lab.runner import run_experiment

    try:
        cfg = _load(config_path, seed_override, allow_seed_override)
    except LabError as e:
        _fail(e)
    if names:
        cfg = cfg.only(*names)
    status = run_experiment(cfg, out)
    if status:
        click.echo(f'Run failed with status {status}; see the manifest in {out or cfg.outputs}', err=True)
    ctx.exit(status)


config_option = click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False),
                             help='Experiment file')
out_option = click.option('--out', default=None, type=click.Path(file_okay=False), help='Report directory')
seed_option = click.option('--seed-override', type=int, default=None, help='Replace every seed in the config')
allow_option = click.option('--allow-seed-override', is_flag=True, help='Permit --seed-override')


@click.group()
@click.option('--threads', type=int, default=None, help='Cap the numba worker pool')
@click.option('--env', default=None, help='development, testing or production')
def cli(threads, env):
    """GL(3) coefficient error-term lab."""
    if env is not None:
        create_lab(CONFIG_MAPPING.get(env, 'config.DevelopmentConfig'))
    lab = current_lab()
    if threads is not None:
        from gl3lab.utils.parallel import set_thread_cap
        lab.config['THREADS'] = set_thread_cap(threads)


@click.command('run')
@config_option
@out_option
@seed_option
@allow_option
@click.pass_context
def run_command(ctx, config_path, out, seed_override, allow_seed_override):
    """Run every enabled pipeline of an experiment."""
    _run_only(ctx, config_path, out, seed_override, allow_seed_override)


@click.command('validate')
@config_option
def validate_command(config_path):
    """List every problem in an experiment file without running it."""
    from gl3lab.experiment import load_experiment, validate_experiment

    try:
        diagnostics = validate_experiment(load_experiment(config_path))
    except LabError as e:
        _fail(e)
    for message in diagnostics:
        click.echo(message)
    if diagnostics:
        sys.exit(2)
    click.echo(f'{config_path}: ok')


@click.command('sieve')
@click.option('--provider', type=click.Choice(['divisor3', 'sym_square']), default='divisor3')
@click.option('--N', 'N', type=int, required=True, help='Table length')
@click.option('--out', 'out', required=True, type=click.Path(dir_okay=False), help='Coefficient file')
def sieve_command(provider, N, out):
    """Write a coefficient table to a file."""
    from gl3lab.coeffs import save_coefficients
    from gl3lab.experiment import ExperimentConfig
    from gl3lab.runner import build_table

    try:
        table, _ = build_table(ExperimentConfig(provider=provider, N=N))
        save_coefficients(table, out)
    except LabError as e:
        _fail(e)
    click.echo(f'Wrote {table.length} {provider} coefficients to {out}')


@click.command('model-sample')
@config_option
@out_option
@seed_option
@allow_option
def model_sample_command(config_path, out, seed_override, allow_seed_override):
    """Draw the random model and write the samples."""
    from gl3lab.random_model import build_model, exact_second_moment, sample_batch
    from gl3lab.runner import build_table
    from gl3lab.utils.reports import ReportWriter

    try:
        cfg = _load(config_path, seed_override, allow_seed_override)
        writer = ReportWriter(out or cfg.outputs, cfg.source_text, cfg.seeds)
        table, _ = build_table(cfg)
        model = build_model(table, cfg.model.N_model, cfg.model.R_model)
        batch = sample_batch(model, cfg.model.seed, cfg.model.draws)
        writer.csv('model_samples.csv', ['draw', 'value'], enumerate(batch.values))
        writer.json('model.json', {'model': model.to_dict(), 'exact_second_moment': exact_second_moment(model)})
        writer.stages.append('model-sample')
        writer.manifest('ok')
    except LabError as e:
        _fail(e)
    click.echo(f'Wrote {batch.count} draws to {os.path.join(writer.out_dir, "model_samples.csv")}')


def _pipeline_command(name, help_text):
    @click.command(name, help=help_text)
    @config_option
    @out_option
    @seed_option
    @allow_option
    @click.pass_context
    def command(ctx, config_path, out, seed_override, allow_seed_override):
        _run_only(ctx, config_path, out, seed_override, allow_seed_override, name)
    return command


discrepancy_command = _pipeline_command('discrepancy', 'KS distance between window and model distributions.')
moments_command = _pipeline_command('moments', 'Diagonal matching, gap bounds and model moments.')
meansquare_command = _pipeline_command('meansquare', 'Mean square of the error term against its prediction.')
tails_command = _pipeline_command('tails', 'Model tail probabilities and the tail envelope.')

CONFIG_MAPPING = {
    'development': 'config.DevelopmentConfig',
    'testing': 'config.TestingConfig',
    'production': 'config.ProductionConfig',
}


def register_commands(group):
    """Register the lab subcommands on a click group."""
    for command in (run_command, validate_command, sieve_command, model_sample_command,
                    discrepancy_command, moments_command, meansquare_command, tails_command):
        group.add_command(command)


register_commands(cli)
