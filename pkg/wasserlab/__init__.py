import sys

from .utils.import_utils import _LazyModule
from .version import __version__

_import_structure = {
    'exceptions': [
        'WasserlabError', 'ConfigurationError', 'InputError', 'DomainError', 'MeasureError',
        'OracleUnavailableError', 'SolverError', 'VerificationError',
    ],
    'base': ['init_norm', 'init_scenario', 'register_norm', 'register_scenario'],
    'norms': [
        'NormSpec', 'EuclideanNorm', 'LqNorm', 'LinfNorm', 'L1Norm', 'CustomNorm',
        'norm_eval', 'norm_grad', 'norm_hessian', 'norm_from_json', 'sphere_sample',
        'strict_convexity_diagnostic',
    ],
    'measures': [
        'DiscreteMeasure', 'TwoPointParams', 'dirac', 'pushforward', 'dilate', 'translate',
        'affine_image', 'barycenter', 'kloeckner_two_point', 'two_point_params', 'shift_weight',
        'measures_close', 'random_measure', 'measure_from_json', 'measure_to_json',
    ],
    'transport': [
        'TransportPlan', 'OTResult', 'cost_matrix', 'solve', 'wasserstein', 'brute_force_oracle',
        'check_plan', 'cyclical_monotonicity_check', 'plan_to_csv_rows',
    ],
    'projections': [
        'AffineSubspace', 'Fingerprint', 'project_point', 'project_measure', 'kernel_membership',
        'max_subspace_in_kernel', 'fingerprint', 'fingerprints_close', 'family_F_check',
        'perturbation_triple',
    ],
    'potentials': [
        'AtomEstimate', 'HessianPairing', 'potential_eval', 'potential_grid', 'potentials_agree',
        'second_diff_G', 'second_diff_bound', 'atom_estimate', 'pairing_T', 'integrated_T',
        'direction_search', 'support_in_translate_check',
    ],
    'rigidity': [
        'AlignmentReport', 'IsometryCandidate', 'Certificate', 'alignment_check',
        'dirac_align_construct', 'l1_escape_construct', 'segment_test', 'midpoint_witness',
        'apply_candidate', 'isometry_certificate', 'convexity_gap', 'commutation_check',
    ],
    'scenarios': ['ScenarioResult', 'run_scenarios'],
    'cli': ['run'],
}

_lazy = _LazyModule(__name__, globals()['__file__'], _import_structure, module_spec=__spec__)
_lazy.__version__ = __version__
sys.modules[__name__] = _lazy
