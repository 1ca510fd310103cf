import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

basedir = os.path.abspath(os.path.dirname(__file__))


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


class Config:
    # General Config
    LAB_NAME = os.environ.get('GL3LAB_NAME') or 'gl3lab'
    LOG_LEVEL = os.environ.get('GL3LAB_LOG_LEVEL') or 'INFO'
    OUTPUT_DIR = os.environ.get('GL3LAB_OUTPUT_DIR') or os.path.join(basedir, 'reports')
    CONFIG_DIR = os.path.join(basedir, 'configs')

    # Resources
    MEMORY_BUDGET_BYTES = _env_int('GL3LAB_MEMORY_BUDGET', 4 * 1024 ** 3)
    THREADS = _env_int('GL3LAB_THREADS', 4)

    # Coefficient providers
    SYM_SQUARE_DENSE_MAX_N = _env_int('GL3LAB_SYM_SQUARE_DENSE_MAX_N', 10 ** 4)
    SYM_SQUARE_MAX_N = _env_int('GL3LAB_SYM_SQUARE_MAX_N', 10 ** 6)
    HECKE_RELATIVE_TOLERANCE = 1e-9

    # Voronoi evaluation
    VORONOI_DEFAULT_ALPHA = 0.6
    EXTENDED_PRECISION_ABOVE = _env_float('GL3LAB_EXTENDED_PRECISION_ABOVE', 1e6)

    # Random model
    LAPLACE_MAX_ABS_LAMBDA = 50.0
    EXACT_TRANSFORM_NODES = 256

    # Enumeration guards
    DIAGONAL_MAX_H = 8
    DIAGONAL_MAX_M = 64
    DIAGONAL_MAX_TERMS = _env_int('GL3LAB_DIAGONAL_MAX_TERMS', 2 * 10 ** 7)
    GAP_MAX_TERMS = 4
    GAP_MAX_INDEX = 16
    TRIG_EXPANSION_MAX_TERMS = 10 ** 7

    # Tail envelope constants b1..b4 (not estimated, supplied)
    TAIL_CONSTANTS = {
        'b1': 1.0,
        'b2': 1.0,
        'b3': 1.0,
        'b4': 1.0,
    }


class DevelopmentConfig(Config):
    DEBUG = True
    LOG_LEVEL = 'DEBUG'


class TestingConfig(Config):
    TESTING = True
    THREADS = 1
    MEMORY_BUDGET_BYTES = 512 * 1024 ** 2
    DIAGONAL_MAX_TERMS = 10 ** 6


class ProductionConfig(Config):
    DEBUG = False
    LOG_LEVEL = os.environ.get('GL3LAB_LOG_LEVEL') or 'WARNING'
