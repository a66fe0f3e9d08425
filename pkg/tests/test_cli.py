import io
import json

import pytest

from wasserlab.cli import run


def _measure(path, atoms):
    path.write_text(json.dumps({'atoms': [{'point': p, 'weight': w} for p, w in atoms]}))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        'origin': _measure(tmp_path / 'origin.json', [([0, 0], 1.0)]),
        'e1': _measure(tmp_path / 'e1.json', [([1, 0], 1.0)]),
        'pair': _measure(tmp_path / 'pair.json', [([0, 0], 0.5), ([1, 0], 0.5)]),
        'tilted': _measure(tmp_path / 'tilted.json', [([1, 1], 0.3), ([0, -1], 0.7)]),
        'bad': _measure(tmp_path / 'bad.json', [([0, 0], 0.5), ([1, 0], 0.49)]),
        'y': _measure(tmp_path / 'y.json', [([0, 1], 1.0)]),
        'escape': _measure(tmp_path / 'escape.json', [([0, 2.5], 1.0)]),
        'dir': tmp_path,
    }


def _run(argv):
    out = io.StringIO()
    code = run(argv, stdout=out)
    return code, out.getvalue()


def test_distance(files):
    code, text = _run(['distance', '--mu', files['origin'], '--nu', files['e1'],
                       '--norm', '{"kind": "lq", "q": 3}', '--p', '2', '--quiet'])
    assert code == 0
    out = json.loads(text)
    assert out['distance'] == pytest.approx(1.0)
    assert out['cost_p'] == pytest.approx(1.0)
    assert out['seed'] == 0


def test_output_is_deterministic(files):
    argv = ['distance', '--mu', files['pair'], '--nu', files['tilted'], '--norm', 'lq',
            '--quiet']
    assert _run(argv)[1] == _run(argv)[1]


def test_plan_csv(files):
    code, text = _run(['plan', '--mu', files['pair'], '--nu', files['origin'], '--format', 'csv',
                       '--quiet'])
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == 'i,j,mass,cost_ij'
    assert len(lines) == 3


def test_align_l1(files):
    code, text = _run(['align', '--mu', files['pair'], '--nu', files['y'], '--eta',
                       files['escape'], '--norm', 'l1', '--p', '1', '--quiet'])
    assert code == 0
    out = json.loads(text)
    assert out['aligned']
    assert out['d_mu_eta'] == pytest.approx(3.0)


def test_align_builds_dilation_for_dirac(files):
    code, text = _run(['align', '--mu', files['origin'], '--nu', files['pair'], '--quiet'])
    assert code == 0
    assert json.loads(text)['aligned']


def test_project_and_out_file(files):
    target = files['dir'] / 'out' / 'projection.json'
    subspace = '{"base": [0, 0], "directions": [[1, 0]]}'
    code, text = _run(['project', '--mu', files['tilted'], '--subspace', subspace,
                       '--norm', '{"kind": "lq", "q": 3}', '--out', str(target), '--quiet'])
    assert code == 0 and text == ''
    atoms = json.loads(target.read_text())['projection']['atoms']
    assert sorted(a['point'][0] for a in atoms) == pytest.approx([0.0, 1.0])


def test_potential_grid_csv(files):
    code, text = _run(['potential', '--mu', files['pair'], '--grid', '-1', '1', '3',
                       '--format', 'csv', '--quiet'])
    assert code == 0
    assert len(text.strip().splitlines()) == 1 + 9


def test_atoms(files):
    code, text = _run(['atoms', '--mu', files['tilted'], '--norm', '{"kind": "lq", "q": 3}',
                       '--p', '1.5', '--quiet'])
    assert code == 0
    estimates = json.loads(text)['estimates']
    assert [e['estimate'] for e in estimates] == pytest.approx([0.3, 0.7], abs=1e-3)


def test_kernel_search(files):
    code, text = _run(['kernel-search', '--norm', 'euclidean', '--p', '2', '--quiet'])
    assert code == 0
    assert json.loads(text)['found'] is False
    code, text = _run(['kernel-search', '--norm', 'euclidean', '--subspace',
                       '{"base": [0, 0], "directions": [[1, 0]]}', '--vector', '[0, 1]',
                       '--quiet'])
    assert code == 0
    assert json.loads(text)['rank'] == 1


def test_certify(files):
    code, text = _run(['certify', '--candidate', '{"kind": "rotation", "angle": 0.785398}',
                       '--mu', files['pair'], '--nu', files['tilted'], '--quiet'])
    assert code == 0
    assert json.loads(text)['preserved']


def test_scenario_and_listing():
    code, text = _run(['scenario', '--id', 'l1_aligned_nondirac', '--quiet'])
    assert code == 0
    out = json.loads(text)
    assert out['summary'] == {'failed': 0, 'passed': 1, 'total': 1}
    assert out['results'][0]['status'] == 'pass'
    code, text = _run(['list-scenarios', '--quiet'])
    assert code == 0
    assert len(json.loads(text)['scenarios']) == 15


def test_explicit_seed_zero_beats_config(files):
    config = files['dir'] / 'seeded.yaml'
    config.write_text('scenarios:\n    seed: 7\n')
    argv = ['scenario', '--id', 'convexity_gap_sign', '--config', str(config), '--quiet']
    assert json.loads(_run(argv)[1])['results'][0]['seed'] == 7
    assert json.loads(_run(argv + ['--seed', '0'])[1])['results'][0]['seed'] == 0


def test_exit_codes(files):
    assert _run(['distance', '--mu', files['bad'], '--nu', files['e1'], '--quiet'])[0] == 3
    assert _run(['distance', '--mu', 'missing.json', '--nu', files['e1'], '--quiet'])[0] == 2
    assert _run(['distance', '--mu', files['origin']])[0] == 2
    assert _run(['teleport'])[0] == 2
    assert _run([])[0] == 2
    assert _run(['distance', '--mu', files['origin'], '--nu', files['e1'], '--norm', 'l7',
                 '--quiet'])[0] == 2
    assert _run(['project', '--mu', files['pair'], '--norm', 'linf', '--subspace',
                 '{"base": [0, 0], "directions": [[1, 0]]}', '--quiet'])[0] == 3
    assert _run(['scenario', '--id', 'no_such_scenario', '--quiet'])[0] == 2
    for norm in ('{"kind": "lq", "r": 3}', '{"kind": "lq", "q": "abc"}'):
        assert _run(['distance', '--mu', files['origin'], '--nu', files['e1'], '--norm', norm,
                     '--quiet'])[0] == 2
