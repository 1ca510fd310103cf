import importlib
import logging

__version__ = '0.3.0'

_current_lab = None


class LabConfig(dict):
    """Mapping of upper-case settings loaded from a config class."""

    def from_object(self, obj):
        if isinstance(obj, str):
            module_name, _, attr = obj.rpartition('.')
            obj = getattr(importlib.import_module(module_name), attr)
        for key in dir(obj):
            if key.isupper():
                self[key] = getattr(obj, key)


class Lab:
    def __init__(self, name):
        self.name = name
        self.config = LabConfig()
        self.logger = logging.getLogger(name)

    def __repr__(self):
        return f'<Lab {self.name}>'


def create_lab(config_class='config.Config'):
    global _current_lab

    lab = Lab(__name__)
    lab.config.from_object(config_class)

    # Configure package logging once
    level = getattr(logging, str(lab.config.get('LOG_LEVEL', 'INFO')).upper(), logging.INFO)
    lab.logger.setLevel(level)
    if not lab.logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s %(name)s: %(message)s'))
        lab.logger.addHandler(handler)

    # Cap the numba worker pool
    from gl3lab.utils.parallel import set_thread_cap
    set_thread_cap(lab.config.get('THREADS'))

    _current_lab = lab
    lab.logger.debug(f'Lab created with {config_class}')
    return lab


def current_lab():
    """Return the active lab, creating one from the default config if needed."""
    if _current_lab is None:
        return create_lab()
    return _current_lab
