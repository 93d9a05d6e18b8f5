import json
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from app import app
from common.enums import PropertyStatus
from common.models import PropertyResult
from handlers.verification import VerificationHandler

CONFIGS = Path(__file__).resolve().parent.parent / 'configs'

runner = CliRunner()


def _floats(text):
    return np.array([[float(v) for v in line.split()] for line in text.strip().splitlines()])


def test_simulate_writes_trajectory_and_summary(tmp_path):
    out = tmp_path / 'line.csv'
    result = runner.invoke(app, ['--out', str(out), 'simulate', str(CONFIGS / 'straight_line.conf')])
    assert result.exit_code == 0, result.output
    assert 'max_residual_norm: 0' in result.stdout
    lines = out.read_text().splitlines()
    assert lines[0].startswith('tau,x0,x1,x2,x3')
    assert len(lines) == 1 + 11


def test_simulate_to_stdout_as_json():
    result = runner.invoke(app, ['--format', 'json', 'simulate', str(CONFIGS / 'straight_line.conf')])
    assert result.exit_code == 0
    document = json.loads(result.stdout)
    assert document['metadata']['method'] == 'rk4-fixed'
    assert len(document['samples']) == 11


def test_simulate_is_deterministic(tmp_path):
    paths = [tmp_path / 'first.csv', tmp_path / 'second.csv']
    for path in paths:
        result = runner.invoke(app, ['--out', str(path), 'simulate', str(CONFIGS / 'golden.conf')])
        assert result.exit_code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_bad_config_exits_with_one(tmp_path):
    config = tmp_path / 'bad.conf'
    config.write_text('m = -1\ns = 0,0,0,1\nu0 = 1,0,0,0\nudot = 0,0,0,0\n')
    result = runner.invoke(app, ['simulate', str(config)])
    assert result.exit_code == 1


@pytest.mark.parametrize('body', [
    # light-like velocity
    's = 0,0,0,1\nu0 = 1,1,0,0\nudot = 0,0,0,0\n',
    's = 0,0,0,0\nu0 = 1,0,0,0\nudot = 0,0,0,0\n',
    # spin along the velocity projects to zero
    's = 2,0,0,0\nu0 = 1,0,0,0\nudot = 0,0,0,0\npirani_project = true\n',
])
def test_degenerate_initial_data_exits_with_one(tmp_path, body):
    config = tmp_path / 'degenerate.conf'
    config.write_text('m = 1\ntau_end = 1\n' + body)
    result = runner.invoke(app, ['simulate', str(config)])
    assert result.exit_code == 1
    assert result.exception is None or isinstance(result.exception, SystemExit)


def test_numerical_failure_exits_with_two(tmp_path):
    config = tmp_path / 'capped.conf'
    config.write_text('m = 1\ns = 0,0,0,1\nu0 = 1,0,0,0\nudot = 0,0.5,0,0\ntau_end = 1\nh0 = 0.01\nmax_steps = 3\n')
    result = runner.invoke(app, ['simulate', str(config)])
    assert result.exit_code == 2


def test_check_jets_passes():
    result = runner.invoke(app, ['--seed', '11', 'check', 'jets', '--samples', '5'])
    assert result.exit_code == 0, result.output
    assert 'suite jets (seed 11)' in result.stdout
    assert result.stdout.count('PASS') == 3


def test_check_report_is_reproducible():
    args = ['--seed', '3', '--format', 'json', 'check', 'jets', '--samples', '8']
    first = runner.invoke(app, args + ['--workers', '1'])
    second = runner.invoke(app, args + ['--workers', '4'])
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout
    report = json.loads(first.stdout)[0]
    assert report['suite'] == 'jets'
    assert all(r['cases'] == 8 for r in report['results'])


def test_check_all_is_byte_identical_across_runs():
    args = ['--seed', '13', 'check', 'all', '--samples', '3', '--workers', '2']
    first = runner.invoke(app, args)
    second = runner.invoke(app, args)
    assert first.exit_code == second.exit_code
    assert first.stdout == second.stdout
    for suite in ('variationality', 'zermelo', 'covariance', 'conservation', 'equivalence',
                  'autoparallel', 'jets', 'homogenization', 'integrator'):
        assert f'suite {suite} (seed 13)' in first.stdout


def test_failed_property_exits_with_three(monkeypatch):
    def failing(self):
        return [PropertyResult(name='broken', status=PropertyStatus.FAILED, cases=1, failures=1,
                               max_residual=1.0, tolerance=1e-12)]
    monkeypatch.setattr(VerificationHandler, 'jets', failing)
    result = runner.invoke(app, ['check', 'jets'])
    assert result.exit_code == 3
    assert 'FAIL' in result.stdout


def test_unknown_suite_is_a_usage_error():
    result = runner.invoke(app, ['check', 'nonsense'])
    assert result.exit_code != 0


def test_convert_tensor_to_vector(tmp_path):
    tensor = tmp_path / 'S.txt'
    tensor.write_text('0 0 0 0\n0 0 2 0\n0 -2 0 0\n0 0 0 0\n')
    result = runner.invoke(app, ['convert', '--tensor', str(tensor), '--u', '1', '0', '0', '0'])
    assert result.exit_code == 0, result.output
    assert np.allclose(_floats(result.stdout), [[0.0, 0.0, 0.0, 2.0]])


def test_convert_round_trip(tmp_path):
    vector = tmp_path / 's.txt'
    vector.write_text('0 0 0 -2\n')
    result = runner.invoke(app, ['convert', '--vector', str(vector), '--u', '1', '0', '0', '0'])
    assert result.exit_code == 0, result.output
    tensor = tmp_path / 'S.txt'
    tensor.write_text(result.stdout)
    back = runner.invoke(app, ['convert', '--tensor', str(tensor), '--u', '1', '0', '0', '0'])
    assert np.allclose(_floats(back.stdout), [[0.0, 0.0, 0.0, -2.0]])


@pytest.mark.parametrize('content, code', [
    ('1 0 0 0\n', 2),
    ('1 2 3\n', 1),
])
def test_convert_errors(tmp_path, content, code):
    vector = tmp_path / 's.txt'
    vector.write_text(content)
    result = runner.invoke(app, ['convert', '--vector', str(vector), '--u', '1', '0', '0', '0'])
    assert result.exit_code == code


def test_convert_rejects_tensor_off_the_pirani_surface(tmp_path):
    tensor = tmp_path / 'S.txt'
    # S^{01} = 1 has u_b S^{ab} != 0 for u = e0
    tensor.write_text('0 1 0 0\n-1 0 0 0\n0 0 0 0\n0 0 0 0\n')
    result = runner.invoke(app, ['convert', '--tensor', str(tensor), '--u', '1', '0', '0', '0'])
    assert result.exit_code == 2
    assert result.stdout == ''


def test_convert_needs_exactly_one_input(tmp_path):
    result = runner.invoke(app, ['convert', '--u', '1', '0', '0', '0'])
    assert result.exit_code == 1
