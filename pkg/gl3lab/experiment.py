"""
Experiment files: INI sections parsed into an ExperimentConfig.

Example::

    [provider]
    name = divisor3

    [table]
    N = 1000000

    [window]
    T = 10000, 100000
    count = 10000
    strategy = grid
    seed = 11

    [model]
    N_model = 1000
    R_model = 10
    draws = 100000
    seed = 7

    [pipelines]
    meansquare = yes
    discrepancy = yes
"""
import configparser
import logging
from dataclasses import dataclass, field, replace

from gl3lab.models import Precision, Provider, VoronoiConfig
from gl3lab.utils.validators import FormatError, LabError

logger = logging.getLogger(__name__)

PIPELINE_NAMES = ('hecke', 'voronoi', 'lemma51', 'meansquare', 'discrepancy', 'moments', 'tails', 'laplace')
WINDOW_MODES = ('auto', 'exact', 'voronoi')

_REQUIRED = object()


def _int_list(text):
    return [int(float(v)) for v in text.replace(';', ',').split(',') if v.strip()]


def _float_list(text):
    return [float(v) for v in text.replace(';', ',').split(',') if v.strip()]


def _integer(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f'{text} is not an integer')
    return int(value)


@dataclass
class WindowSpec:
    T: list = field(default_factory=lambda: [10 ** 4])
    count: int = 10 ** 4
    strategy: str = 'grid'
    seed: int = None
    mode: str = 'auto'


@dataclass
class ModelSpec:
    N_model: int = 100
    R_model: int = None
    draws: int = 10 ** 5
    seed: int = None


@dataclass
class MomentsSpec:
    hs: list = field(default_factory=lambda: [1, 2, 3, 4])
    M: int = 10
    alpha0: float = 1.0
    Ts: list = field(default_factory=lambda: [1e4, 1e6, 1e8])
    ks: list = field(default_factory=lambda: [2, 4, 6])
    gap_m: int = 4
    gap_M: int = 12


@dataclass
class TailsSpec:
    multiples: list = field(default_factory=lambda: [1.0, 2.0, 3.0])
    eps1: float = 0.01
    eps2: float = 0.01
    lambdas: list = field(default_factory=lambda: [2.0, 4.0, 6.0, 8.0, 10.0, 12.0])
    constants: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    """
    Parsed experiment file. Problems found while parsing are kept in
    ``diagnostics`` and reported together with the cross-field checks.
    """
    provider: str = 'divisor3'
    provider_params: dict = field(default_factory=dict)
    N: int = 10 ** 5
    hecke_bound: int = 100
    meansquare_points: list = field(default_factory=list)
    window: WindowSpec = field(default_factory=WindowSpec)
    model: ModelSpec = field(default_factory=ModelSpec)
    voronoi_alpha: float = 0.6
    voronoi_alphas: list = field(default_factory=lambda: [0.55, 0.65])
    voronoi_sample_count: int = 100
    voronoi_precision: str = 'double'
    voronoi_x: float = None
    N_trunc: int = 4
    moments: MomentsSpec = field(default_factory=MomentsSpec)
    tails: TailsSpec = field(default_factory=TailsSpec)
    berry_esseen_R: float = 20.0
    berry_esseen_points: int = 100
    outputs: str = 'reports'
    pipelines: dict = field(default_factory=lambda: {name: False for name in PIPELINE_NAMES})
    source_text: str = ''
    source: str = '<string>'
    diagnostics: list = field(default_factory=list)

    @property
    def voronoi(self):
        return VoronoiConfig(alpha=self.voronoi_alpha, sample_count=self.voronoi_sample_count,
                             argument_precision=self.voronoi_precision)

    @property
    def enabled(self):
        return [name for name in PIPELINE_NAMES if self.pipelines.get(name)]

    @property
    def seeds(self):
        return {'window': self.window.seed, 'model': self.model.seed}

    def with_seed(self, seed):
        return replace(self, window=replace(self.window, seed=seed), model=replace(self.model, seed=seed))

    def only(self, *names):
        return replace(self, pipelines={name: name in names for name in PIPELINE_NAMES})


class _Reader:
    def __init__(self, parser, diagnostics):
        self.parser = parser
        self.diagnostics = diagnostics

    def get(self, section, key, convert=str, default=_REQUIRED):
        if not self.parser.has_option(section, key):
            if default is _REQUIRED:
                self.diagnostics.append(f'[{section}] {key}: missing required key')
            return None if default is _REQUIRED else default
        raw = self.parser.get(section, key)
        try:
            return convert(raw)
        except (TypeError, ValueError) as e:
            self.diagnostics.append(f'[{section}] {key}: cannot read {raw!r} ({e})')
            return None if default is _REQUIRED else default

    def flag(self, section, key, default=False):
        if not self.parser.has_option(section, key):
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            self.diagnostics.append(f'[{section}] {key}: expected yes/no, got {self.parser.get(section, key)!r}')
            return default


def parse_experiment(text, source='<string>'):
    """
    Parse experiment text.

    Args:
        text: INI contents
        source: Name used in error messages

    Returns:
        ExperimentConfig

    Raises:
        FormatError: When the text is not valid INI
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=('#', ';'))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise FormatError(f'{source}: {e}')

    diagnostics = []
    read = _Reader(parser, diagnostics)
    cfg = ExperimentConfig(source_text=text, source=source, diagnostics=diagnostics)

    cfg.provider = read.get('provider', 'name', str, 'divisor3').strip()
    if parser.has_section('provider'):
        cfg.provider_params = {k: v for k, v in parser.items('provider') if k != 'name'}
    cfg.N = read.get('table', 'N', _integer)
    cfg.hecke_bound = read.get('table', 'hecke_bound', _integer, cfg.hecke_bound)
    cfg.meansquare_points = read.get('table', 'meansquare_points', _float_list, [])

    cfg.window = WindowSpec(
        T=read.get('window', 'T', _float_list, [10 ** 4]),
        count=read.get('window', 'count', _integer, 10 ** 4),
        strategy=read.get('window', 'strategy', str, 'grid'),
        seed=read.get('window', 'seed', _integer),
        mode=read.get('window', 'mode', str, 'auto'),
    )
    cfg.model = ModelSpec(
        N_model=read.get('model', 'N_model', _integer, 100),
        R_model=read.get('model', 'R_model', _integer, None),
        draws=read.get('model', 'draws', _integer, 10 ** 5),
        seed=read.get('model', 'seed', _integer),
    )

    cfg.voronoi_alpha = read.get('voronoi', 'alpha', float, cfg.voronoi_alpha)
    cfg.voronoi_alphas = read.get('voronoi', 'compare_alphas', _float_list, cfg.voronoi_alphas)
    cfg.voronoi_sample_count = read.get('voronoi', 'sample_count', _integer, cfg.voronoi_sample_count)
    cfg.voronoi_precision = read.get('voronoi', 'precision', str, cfg.voronoi_precision)
    cfg.voronoi_x = read.get('voronoi', 'x', float, None)
    cfg.N_trunc = read.get('voronoi', 'N_trunc', _integer, cfg.N_trunc)

    defaults = MomentsSpec()
    cfg.moments = MomentsSpec(
        hs=read.get('moments', 'h', _int_list, defaults.hs),
        M=read.get('moments', 'M', _integer, defaults.M),
        alpha0=read.get('moments', 'alpha0', float, defaults.alpha0),
        Ts=read.get('moments', 'T', _float_list, defaults.Ts),
        ks=read.get('moments', 'k', _int_list, defaults.ks),
        gap_m=read.get('moments', 'gap_m', _integer, defaults.gap_m),
        gap_M=read.get('moments', 'gap_M', _integer, defaults.gap_M),
    )

    tails = TailsSpec()
    cfg.tails = TailsSpec(
        multiples=read.get('tails', 'V_multiples', _float_list, tails.multiples),
        eps1=read.get('tails', 'eps1', float, tails.eps1),
        eps2=read.get('tails', 'eps2', float, tails.eps2),
        lambdas=read.get('tails', 'lambdas', _float_list, tails.lambdas),
        constants={b: read.get('tails', b, float) for b in ('b1', 'b2', 'b3', 'b4')
                   if parser.has_option('tails', b)},
    )
    cfg.berry_esseen_R = read.get('discrepancy', 'R', float, cfg.berry_esseen_R)
    cfg.berry_esseen_points = read.get('discrepancy', 'quad_points', _integer, cfg.berry_esseen_points)

    cfg.outputs = read.get('outputs', 'directory', str, cfg.outputs)
    cfg.pipelines = {name: read.flag('pipelines', name) for name in PIPELINE_NAMES}
    if parser.has_section('pipelines'):
        for key in parser.options('pipelines'):
            if key not in PIPELINE_NAMES:
                diagnostics.append(f'[pipelines] {key}: unknown pipeline, allowed {", ".join(PIPELINE_NAMES)}')
    return cfg


def load_experiment(path):
    """Read and parse an experiment file."""
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise FormatError(f'cannot read experiment file {path}: {e}')
    return parse_experiment(text, source=str(path))


def validate_experiment(cfg):
    """
    Every violation in the config, parse problems included.

    Returns:
        list: Diagnostic strings, empty when the config is runnable
    """
    diagnostics = list(cfg.diagnostics)
    allowed = [p.value for p in Provider]
    if cfg.provider not in allowed:
        diagnostics.append(f'[provider] name: unknown provider {cfg.provider!r}, allowed {", ".join(allowed)}')
    elif cfg.provider == Provider.EXTERNAL.value and not cfg.provider_params.get('path'):
        diagnostics.append('[provider] path: the external provider needs a coefficient file')

    N = cfg.N
    if N is not None and N < 1:
        diagnostics.append(f'[table] N: must be positive, got {N}')
        N = None

    model = cfg.model
    if model.N_model is not None and model.N_model < 1:
        diagnostics.append(f'[model] N_model: must be positive, got {model.N_model}')
    elif N is not None and model.N_model is not None:
        R = model.R_model if model.R_model is not None else 1
        if model.N_model * R ** 3 > N:
            diagnostics.append(
                f'[model] N_model * R_model^3 = {model.N_model} * {R}^3 = {model.N_model * R ** 3} '
                f'exceeds [table] N = {N}')
    if model.draws is not None and model.draws < 1:
        diagnostics.append(f'[model] draws: must be positive, got {model.draws}')

    window = cfg.window
    if window.strategy not in ('grid', 'uniform'):
        diagnostics.append(f'[window] strategy: unknown {window.strategy!r}, allowed grid, uniform')
    if window.mode not in WINDOW_MODES:
        diagnostics.append(f'[window] mode: unknown {window.mode!r}, allowed {", ".join(WINDOW_MODES)}')
    for T in window.T or []:
        if T < 16:
            diagnostics.append(f'[window] T: {T} is below 16, iterated logarithms undefined')
        if window.mode == 'exact' and N is not None and 2 * T > N:
            diagnostics.append(f'[window] T: exact mode needs 2T <= [table] N, got T = {T:g}, N = {N}')
    if window.count is not None and window.count < 1:
        diagnostics.append(f'[window] count: must be positive, got {window.count}')

    if cfg.voronoi_precision not in [p.value for p in Precision]:
        diagnostics.append(f'[voronoi] precision: unknown {cfg.voronoi_precision!r}, allowed double, extended')
    else:
        try:
            cfg.voronoi
        except LabError as e:
            diagnostics.append(f'[voronoi] {e}')
    if N is not None and cfg.N_trunc is not None and cfg.N_trunc ** 4 > N and cfg.pipelines.get('voronoi'):
        diagnostics.append(f'[voronoi] N_trunc: N_trunc^4 = {cfg.N_trunc ** 4} exceeds [table] N = {N}')

    moments = cfg.moments
    if cfg.pipelines.get('moments'):
        if any(h < 1 or h > 8 for h in moments.hs):
            diagnostics.append(f'[moments] h: values must lie in 1..8, got {moments.hs}')
        if moments.M < 1 or (model.N_model is not None and moments.M > model.N_model * (model.R_model or 1) ** 3):
            diagnostics.append(f'[moments] M: {moments.M} exceeds the model support')
        if moments.gap_m > 4 or moments.gap_M > 16:
            diagnostics.append(f'[moments] gap_m/gap_M: brute force limited to m <= 4, M <= 16')

    if cfg.pipelines.get('hecke') and N is not None and cfg.hecke_bound > N:
        diagnostics.append(f'[table] hecke_bound: {cfg.hecke_bound} exceeds N = {N}')
    for x in cfg.meansquare_points:
        if N is not None and not 0 < x <= N:
            diagnostics.append(f'[table] meansquare_points: {x:g} outside (0, N = {N}]')
    if any(abs(lam) > 50 for lam in cfg.tails.lambdas):
        diagnostics.append(f'[tails] lambdas: |lambda| must not exceed 50')

    for message in diagnostics:
        logger.warning(f'{cfg.source}: {message}')
    return diagnostics
