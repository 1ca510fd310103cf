"""
CSV and JSON report emission and the run manifest.
"""
import csv
import hashlib
import json
import logging
import os
import platform
import time

import numpy as np

logger = logging.getLogger(__name__)


def _plain(value):
    """Convert numpy scalars and arrays to JSON-friendly Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    if hasattr(value, 'to_dict'):
        return _plain(value.to_dict())
    return value


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows):
    """
    Write rows with a header line; floats use repr so reruns are byte-identical.

    Args:
        path: Output file
        header: Column names
        rows: Iterable of sequences

    Returns:
        str: The path written
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_json(path, payload):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(_plain(payload), f, indent=2, sort_keys=True)
        f.write('\n')
    return path


def config_hash(text):
    """sha256 of the experiment file contents."""
    if isinstance(text, str):
        text = text.encode('utf-8')
    return hashlib.sha256(text).hexdigest()


def library_versions():
    import click
    import mpmath
    import numba
    import scipy
    import sympy

    from gl3lab import __version__
    return {
        'gl3lab': __version__,
        'python': platform.python_version(),
        'numpy': np.__version__,
        'numba': numba.__version__,
        'scipy': scipy.__version__,
        'mpmath': mpmath.__version__,
        'sympy': sympy.__version__,
        'click': click.__version__,
    }


class ReportWriter:
    """
    Collects the reports of one run under an output directory.

    Every JSON report keeps numbers asserted by theory under 'asserted' and
    measured or fitted numbers under 'recorded'.
    """

    def __init__(self, out_dir, config_text='', seeds=None):
        self.out_dir = out_dir
        self.config_hash = config_hash(config_text)
        self.seeds = dict(seeds or {})
        self.stages = []
        self.files = []
        self.wall_times = {}
        self.started = time.time()
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def csv(self, name, header, rows):
        self.files.append(name)
        return write_csv(self.path(name), header, rows)

    def json(self, name, recorded, asserted=None):
        self.files.append(name)
        return write_json(self.path(name), {'asserted': asserted or {}, 'recorded': recorded})

    def stage(self, name):
        return _Stage(self, name)

    def manifest(self, status, error=None):
        """Write manifest.json; called on success and on every failure path."""
        payload = {
            'status': status,
            'config_sha256': self.config_hash,
            'seeds': self.seeds,
            'versions': library_versions(),
            'completed_stages': list(self.stages),
            'wall_times': self.wall_times,
            'files': list(self.files),
            'started': self.started,
            'finished': time.time(),
        }
        if error is not None:
            payload['error'] = {'type': type(error).__name__, 'message': str(error)}
        path = write_json(self.path('manifest.json'), payload)
        logger.info(f'Manifest written to {path} ({status})')
        return path


class _Stage:
    def __init__(self, writer, name):
        self.writer = writer
        self.name = name

    def __enter__(self):
        self.start = time.perf_counter()
        logger.info(f'Stage {self.name} started')
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        self.writer.wall_times[self.name] = elapsed
        if exc_type is None:
            self.writer.stages.append(self.name)
            logger.info(f'Stage {self.name} done in {elapsed:.2f}s')
        return False
