"""YAML configuration with built-in defaults."""
import copy
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import yaml

from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG: Dict = {
    'transport': {
        'max_iter': 100000,
        'perturbation': 1e-13,
        'bland_after': 50,
        'pivot_tol': 1e-12,
        'reduced_cost_tol': 1e-9,
        'marginal_tol': 1e-10,
    },
    'projection': {
        'grad_tol': 1e-11,
        'max_iter': 200,
        'armijo': 1e-4,
        'levenberg': 1e-14,
        'golden_sweeps': 200,
        'probe_directions': 15,
        'probe_radii': [0.5, 2.0],
        'candidate_samples': 40,
    },
    'potentials': {
        'h0': 1.0,
        'shrink': 0.5,
        'steps': 21,
        'window_tol': 5e-4,
        'samples': 400,
        'min_tol': 1e-8,
        'max_tol': 1e-4,
        'neg_tol': 1e-8,
    },
    'rigidity': {
        'tol': 1e-8,
    },
    'scenarios': {
        'ids': 'all',
        'workers': 1,
        'seed': 0,
        'params': {},
    },
}


def _merge(base: Dict, override: Dict) -> Dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: Optional[Union[str, Path]] = None) -> Dict:
    """Defaults overlaid with the YAML file at `path` (defaults only when None)."""
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(path, 'r', encoding='utf-8') as reader:
            loaded = yaml.safe_load(reader) or {}
    except OSError as e:
        raise ConfigurationError(f'cannot read config {path}: {e}') from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f'config {path} is not valid YAML: {e}') from e
    if not isinstance(loaded, dict):
        raise ConfigurationError(f'config {path} must be a mapping')
    unknown = set(loaded) - set(DEFAULT_CONFIG)
    if unknown:
        logger.warning('ignoring unknown config sections: %s', ', '.join(sorted(unknown)))
    return _merge(DEFAULT_CONFIG, loaded)
