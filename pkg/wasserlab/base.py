import importlib
import logging
from typing import Dict

from .exceptions import ConfigurationError, WasserlabError

logger = logging.getLogger(__name__)

# registry key -> module that registers it on import
register_map = {
    'norm': {
        'euclidean': 'wasserlab.norms',
        'lq': 'wasserlab.norms',
        'linf': 'wasserlab.norms',
        'l1': 'wasserlab.norms',
        'custom': 'wasserlab.norms',
    },
    'scenario': {
        'dirac_dilation_alignment': 'wasserlab.scenarios',
        'l1_aligned_nondirac': 'wasserlab.scenarios',
        'maxnorm_potential_equality': 'wasserlab.scenarios',
        'l4_kernel_surface': 'wasserlab.scenarios',
        'projection_homogeneity': 'wasserlab.scenarios',
        'measure_projection_minimality': 'wasserlab.scenarios',
        'fingerprint_injectivity_on_F': 'wasserlab.scenarios',
        'perturbation_distance_identity': 'wasserlab.scenarios',
        'atom_recovery_p15': 'wasserlab.scenarios',
        'direction_search_lq': 'wasserlab.scenarios',
        'lq_hessian_formula': 'wasserlab.scenarios',
        'phi_t_noniso_q3': 'wasserlab.scenarios',
        'phi_star_noniso_q3': 'wasserlab.scenarios',
        'convexity_gap_sign': 'wasserlab.scenarios',
        'euclidean_rotation_isometry_p2': 'wasserlab.scenarios',
    },
}


class Registry(dict):
    """Name -> class mapping that imports the defining module on first lookup."""

    def __init__(self, kind: str):
        super().__init__()
        self.kind = kind

    def _import_key(self, key):
        module = register_map[self.kind].get(key)
        if module is None:
            return
        try:
            importlib.import_module(module)
        except ImportError as e:
            logger.error('import of %s %r failed: %s', self.kind, key, e)

    def __getitem__(self, key):
        if key not in self.keys():
            self._import_key(key)
        if key not in self.keys():
            raise ConfigurationError(f'unknown {self.kind} {key!r}')
        return super().__getitem__(key)

    def __contains__(self, key):
        if not super().__contains__(key):
            self._import_key(key)
        return super().__contains__(key)

    def names(self):
        return sorted(register_map[self.kind])


NORM_REGISTRY = Registry('norm')
SCENARIO_REGISTRY = Registry('scenario')


def register_norm(name):

    def decorator(cls):
        NORM_REGISTRY[name] = cls
        cls.kind = name
        return cls

    return decorator


def register_scenario(name):

    def decorator(cls):
        SCENARIO_REGISTRY[name] = cls
        cls.scenario_id = name
        return cls

    return decorator


def init_norm(cfg: Dict):
    """Build a norm from its JSON/YAML description, e.g. ``{"kind": "lq", "q": 4}``."""
    if not isinstance(cfg, dict) or 'kind' not in cfg:
        raise ConfigurationError(f'norm description needs a "kind": {cfg!r}')
    params = {k: v for k, v in cfg.items() if k != 'kind'}
    cls = NORM_REGISTRY[cfg['kind']]
    try:
        return cls(**params)
    except WasserlabError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigurationError(
            f'bad parameters {sorted(params)} for norm {cfg["kind"]!r}: {e}') from e


def init_scenario(name: str, cfg: Dict = None):
    return SCENARIO_REGISTRY[name](cfg or {})
