import csv
import io
import json
import os

import pytest

from markov_opinion import util
from markov_opinion.input_reader import dump_scenario, parse_scenario
from markov_opinion.network import CAPACITY_ENV
from opinion_dynamics import main


def _rows(text):
    header, *rows = list(csv.reader(io.StringIO(text)))
    return header, rows


def _write_document(tmp_path, document, name='scenario.json'):
    path = tmp_path / name
    path.write_text(json.dumps(document), encoding='utf-8')
    return str(path)


def test_validate_bundled(bundled_path, capsys):
    assert main(['validate', bundled_path]) == 0
    assert capsys.readouterr().out == 'pass\n'


def test_validate_reports_violations(tmp_path, intersection, capsys):
    document = dump_scenario(intersection)
    document['groups'][0]['lambda'] = -1

    assert main(['validate', _write_document(tmp_path, document)]) == 3
    assert 'groups[0].lambda: lambda must be nonnegative' in capsys.readouterr().out


def test_stationary_marginals(bundled_path, capsys):
    assert main(['stationary', bundled_path]) == 0
    header, rows = _rows(capsys.readouterr().out)

    assert header == ['agent', 'state', 'probability']
    assert len(rows) == 14
    for agent in map(str, range(1, 8)):
        assert sum(float(p) for a, _, p in rows if a == agent) == pytest.approx(1.0, abs=1e-9)


def test_isolated_stationary_argmax(bundled_path, capsys):
    assert main(['stationary', bundled_path, '--model', 'isolated', '--method', 'marginal']) == 0
    _, rows = _rows(capsys.readouterr().out)

    best = {}
    for agent, state, p in rows:
        if agent not in best or float(p) > best[agent][1]:
            best[agent] = (state, float(p))
    assert {a: s for a, (s, _) in best.items()} == {'1': 'Go', '2': 'Go', '3': 'Go', '4': 'Yield',
                                                     '5': 'Go', '6': 'Go', '7': 'Go'}


def test_attract_network_driver_undecided(bundled_path, capsys):
    assert main(['stationary', bundled_path, '--model', 'attract', '--method', 'network']) == 0
    _, rows = _rows(capsys.readouterr().out)

    go = [float(p) for a, s, p in rows if a == '4' and s == 'Go'][0]
    assert 0.45 <= go <= 0.55


def test_joint_stationary(bundled_path, capsys):
    assert main(['stationary', bundled_path, '--method', 'network', '--joint']) == 0
    _, rows = _rows(capsys.readouterr().out)

    assert len(rows) == 128
    assert {a for a, _, _ in rows} == {'network'}
    assert sum(float(p) for _, _, p in rows) == pytest.approx(1.0, abs=1e-9)


def test_joint_needs_network_method(bundled_path):
    assert main(['stationary', bundled_path, '--joint']) == 1


def test_transient_to_file(bundled_path, tmp_path):
    out = str(tmp_path / 'results' / 'transient.csv')
    assert main(['transient', bundled_path, '--t-end', '2', '--points', '5', '--out', out]) == 0

    with open(out, encoding='utf-8') as f:
        header, rows = _rows(f.read())
    assert header == ['t', 'agent', 'state', 'probability']
    assert len(rows) == 5 * 7 * 2
    assert float(rows[0][0]) == 0.0 and float(rows[-1][0]) == 2.0
    assert float(rows[0][3]) == 0.5


def test_isolated_output_ignores_group_parameters(tmp_path, intersection, capsys):
    document = dump_scenario(intersection)
    for group in document['groups']:
        group['lambda'] = 3.0
    for edge in document['repulsions']:
        edge['gamma'] = 0.9

    assert main(['stationary', _write_document(tmp_path, dump_scenario(intersection), 'a.json'),
                 '--model', 'isolated']) == 0
    first = capsys.readouterr().out
    assert main(['stationary', _write_document(tmp_path, document, 'b.json'), '--model', 'isolated']) == 0
    assert capsys.readouterr().out == first


def test_simulate_is_reproducible(bundled_path, tmp_path):
    outputs = []
    for name in ('first.csv', 'second.csv'):
        out = str(tmp_path / name)
        assert main(['simulate', bundled_path, '--replicates', '4', '--horizon', '20', '--burn-in', '2',
                     '--seed', '5', '--out', out]) == 0
        with open(out, 'rb') as f:
            outputs.append(f.read())

    assert outputs[0] == outputs[1]
    header, rows = _rows(outputs[0].decode('utf-8'))
    assert header == ['agent', 'state', 'estimate', 'stderr']
    assert len(rows) == 14


def test_simulate_accepts_negative_seed(bundled_path, capsys):
    assert main(['simulate', bundled_path, '--replicates', '2', '--horizon', '5', '--burn-in', '1',
                 '--seed', '-1']) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert len(rows) == 14


def test_malformed_scenario_exit_code(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"states": [', encoding='utf-8')

    assert main(['stationary', str(path)]) == 2
    assert main(['validate', str(tmp_path / 'missing.json')]) == 2
    assert main(['stationary']) == 2


def test_invalid_scenario_exit_code(tmp_path, intersection):
    document = dump_scenario(intersection)
    document['agents'][0]['Q'][0][1] = 0.4

    assert main(['stationary', _write_document(tmp_path, document)]) == 3


def test_capacity_exit_code(bundled_path, monkeypatch):
    monkeypatch.delenv(CAPACITY_ENV, raising=False)
    assert main(['stationary', bundled_path, '--method', 'network', '--cap', '100']) == 4

    monkeypatch.setenv(CAPACITY_ENV, '64')
    assert main(['transient', bundled_path, '--method', 'network', '--points', '3']) == 4
    # the marginal model is not bounded by the cap
    assert main(['stationary', bundled_path, '--method', 'marginal']) == 0


def test_compare_without_simulation(bundled_path, capsys):
    assert main(['compare', bundled_path, '--skip-simulation']) == 0

    table = capsys.readouterr().out
    for name in ('isolated', 'attract', 'full'):
        assert '%s stationary' % name in table
        assert '%s transient' % name in table
    assert 'FAIL' not in table


def test_compare_with_impossible_simulation_tolerance(bundled_path, capsys):
    code = main(['compare', bundled_path, '--replicates', '3', '--horizon', '10', '--burn-in', '1',
                 '--sim-atol', '0'])

    assert code == 5
    assert 'simulation abs' in capsys.readouterr().out


def test_example_writes_bundled_scenario(tmp_path, intersection):
    out = str(tmp_path / 'intersection.json')

    assert main(['example', 'intersection', '--out', out]) == 0
    assert parse_scenario(out) == intersection


def test_example_to_stdout(capsys, intersection):
    assert main(['example']) == 0
    document = json.loads(capsys.readouterr().out)

    assert document['states'] == ['Yield', 'Go']
    assert len(document['agents']) == 7


def test_unknown_example(capsys):
    assert main(['example', 'roundabout']) == 2


def test_unknown_mode(capsys):
    assert main(['fly']) == 2
    assert 'Mode not in' in capsys.readouterr().err


def test_config_file_runs_all_and_returns_worst(tmp_path, bundled_path, capsys):
    broken = tmp_path / 'broken.json'
    broken.write_text('not json', encoding='utf-8')

    config = tmp_path / 'validate.conf'
    config.write_text('# two runs\nscenario_path = %s\n\nscenario_path = %s\n' % (bundled_path, broken),
                      encoding='utf-8')

    assert main(['validate', '--config', str(config)]) == 2
    assert capsys.readouterr().out == 'pass\n'


def test_config_repeat(tmp_path, bundled_path, capsys):
    config = tmp_path / 'stationary.conf'
    config.write_text('[2]\nscenario_path = %s\nmodel = isolated\n' % bundled_path, encoding='utf-8')

    assert main(['stationary', '--config', str(config)]) == 0
    out = capsys.readouterr().out
    assert out.count('agent,state,probability') == 2


def test_log_path_writes_run_logs(bundled_path, tmp_path, capsys):
    logs = tmp_path / 'logs'
    assert main(['stationary', bundled_path, '--log_path', str(logs), '--label', 'check']) == 0

    runs = os.listdir(str(logs / 'check'))
    assert len(runs) == 1
    run = logs / 'check' / runs[0]
    assert (run / 'all.log').exists()

    with open(str(run / 'args.json')) as f:
        arguments = json.load(f)
    assert arguments['scenario_path'] == bundled_path
    assert arguments['model'] == 'full'


def test_compare_log_csv(bundled_path, tmp_path):
    logs = tmp_path / 'logs'
    assert main(['compare', bundled_path, '--skip-simulation', '--log_path', str(logs), '--out',
                 str(tmp_path / 'table.txt')]) == 0

    run = logs / 'run' / os.listdir(str(logs / 'run'))[0]
    header, rows = util.read_csv(str(run / 'checks_compare.csv'))
    assert header == ['check', 'deviation', 'tolerance', 'passed']
    assert len(rows) == 6
    assert all(row[3] == 'True' for row in rows)
