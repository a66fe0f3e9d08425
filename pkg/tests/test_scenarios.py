import pytest

from wasserlab.base import SCENARIO_REGISTRY, init_scenario
from wasserlab.exceptions import ConfigurationError, DomainError
from wasserlab.scenarios import Check, Scenario, ScenarioRunner, run_scenarios
from wasserlab.utils.config import load_config

ALL_IDS = SCENARIO_REGISTRY.names()


def test_corpus_ids():
    assert len(ALL_IDS) == 15
    assert 'perturbation_distance_identity' in ALL_IDS
    assert all(SCENARIO_REGISTRY[sid].anchor for sid in ALL_IDS)


@pytest.mark.parametrize('scenario_id', ALL_IDS)
def test_scenario_passes(scenario_id):
    cfg = load_config()
    scenario_cfg = {'seed': 0, 'transport': cfg['transport'], 'projection': cfg['projection'],
                    'potentials': cfg['potentials']}
    result = init_scenario(scenario_id, scenario_cfg).call({})
    assert result.status == 'pass', result.message
    assert result.checks


def test_check_relations():
    assert Check('a', 1.0, 1.0 + 1e-12, 1e-9).passed
    assert not Check('a', 1.0, 1.1, 1e-9).passed
    assert Check('b', 0.2, 0.0, relation='gt').passed
    assert not Check('b', 0.0, 0.0, relation='gt').passed
    assert Check('c', -1.0, 0.0, relation='lt').passed
    assert not Check('d', float('nan'), 0.0, 1.0).passed


class _Broken(Scenario):
    scenario_id = 'broken'
    anchor = 'raises'

    def checks(self, params):
        raise DomainError('bad input')


def test_library_errors_become_failures():
    result = _Broken({}).call()
    assert result.status == 'fail'
    assert 'DomainError' in result.message


def test_result_json():
    result = init_scenario('convexity_gap_sign').call()
    out = result.to_json()
    assert out['status'] == 'pass'
    assert out['seed'] == 0
    assert set(out['observed']) == set(out['expected'])


def test_params_override():
    result = init_scenario('maxnorm_potential_equality').call({'grid': 11})
    assert result.status == 'pass'
    assert result.to_json()['observed']['grid_points'] == 121


def test_measure_count_override():
    result = init_scenario('perturbation_distance_identity').call({'measures': 3, 'exponents': [1.5]})
    assert result.status == 'pass', result.message
    assert result.to_json()['observed']['triples_built'] == 3


def test_runner_orders_by_id():
    results = run_scenarios(['l1_aligned_nondirac', 'convexity_gap_sign'], progress=False)
    assert [r.scenario_id for r in results] == ['convexity_gap_sign', 'l1_aligned_nondirac']


def test_runner_rejects_unknown_ids():
    with pytest.raises(ConfigurationError):
        ScenarioRunner().resolve(['no_such_scenario'])


def test_runner_with_worker_processes():
    cfg = load_config()
    cfg['scenarios']['workers'] = 2
    results = run_scenarios(['convexity_gap_sign', 'phi_star_noniso_q3'], cfg, progress=False)
    assert [r.scenario_id for r in results] == ['convexity_gap_sign', 'phi_star_noniso_q3']
    assert all(r.status == 'pass' for r in results)
