import json
from pathlib import Path

import numpy as np
import pytest

from common.enums import IntegratorMethod, OutputFormat
from common.errors import ConfigParseError
from core.app_config import OutputConfig
from file_ops.run_config import RunConfigFile
from file_ops.spin_io import SpinFile, format_number
from file_ops.trajectory_io import TrajectoryReader, TrajectoryWriter
from handlers.simulation import SimulationHandler
from mechanics.minkowski import SpinTensor

CONFIGS = Path(__file__).resolve().parent.parent / 'configs'

MINIMAL = '''
# rest-frame helix
m = 1
s = 0, 0, 0, 1
u0 = 1, 0, 0, 0
udot = 0, 0.5, 0, 0
tau_end = 0.5
'''


def test_parse_minimal_config():
    config = RunConfigFile.parse_text(MINIMAL)
    assert config.m == 1.0
    assert config.rest_mass == 1.0
    assert config.s == [0.0, 0.0, 0.0, 1.0]
    assert config.a0 == [0.0, 0.5, 0.0, 0.0]
    assert config.signature == [1, -1, -1, -1]
    assert config.integrator.tau_end == 0.5
    assert config.integrator.method is IntegratorMethod.RK45_ADAPTIVE
    assert config.format is OutputFormat.CSV


def test_parse_aliases_and_signs():
    text = MINIMAL + 'A = 0.25\nsignature = +,-,-,-\norientation = -1\nmethod = rk4-fixed\ntolRel = 1e-8\n'
    config = RunConfigFile.parse_text(text)
    assert config.A == 0.25
    assert config.orientation == -1
    assert config.integrator.method is IntegratorMethod.RK4_FIXED
    assert config.integrator.tol_rel == 1e-8


@pytest.mark.parametrize('extra, key', [
    ('m0 = -2\n', 'm0'),
    ('bogus = 1\n', 'bogus'),
    ('h0 = fast\n', 'h0'),
    ('method = euler\n', 'method'),
    ('x0 = 1, 2, 3\n', 'x0'),
    ('pirani_project = maybe\n', 'pirani_project'),
    ('m = 2\n', 'm'),
    ('no equals sign\n', 'line 8'),
])
def test_parse_errors_name_the_key(extra, key):
    with pytest.raises(ConfigParseError) as info:
        RunConfigFile.parse_text(MINIMAL + extra)
    assert info.value.key == key
    assert info.value.exit_code == 1


def test_missing_required_field():
    with pytest.raises(ConfigParseError) as info:
        RunConfigFile.parse_text('s = 0, 0, 0, 1\nu0 = 1, 0, 0, 0\nudot = 0, 0, 0, 0\n')
    assert info.value.key == 'm'


@pytest.mark.parametrize('s, u0, key', [
    ('0, 0, 0, 0', '1, 0, 0, 0', 's'),
    ('1, 0, 0, 1', '1, 0, 0, 0', 's'),
    ('0, 0, 0, 1', '1, 1, 0, 0', 'u0'),
])
def test_degenerate_vectors_are_config_errors(s, u0, key):
    with pytest.raises(ConfigParseError) as info:
        RunConfigFile.parse_text(f'm = 1\ns = {s}\nu0 = {u0}\nudot = 0, 0, 0, 0\n')
    assert info.value.key == key
    assert info.value.exit_code == 1


def test_degeneracy_uses_configured_signature():
    # null under (+,-,-,-), spacelike under (+,+,+,+)
    config = RunConfigFile.parse_text('m = 1\ns = 1, 0, 0, 1\nu0 = 1, 0, 0, 0\nudot = 0, 0, 0, 0\n'
                                      'signature = +,+,+,+\n')
    assert config.s == [1.0, 0.0, 0.0, 1.0]


def test_projection_leaving_no_spin_is_a_config_error():
    config = RunConfigFile.parse_text('m = 1\ns = 2, 0, 0, 0\nu0 = 1, 0, 0, 0\nudot = 0, 0, 0, 0\n'
                                      'pirani_project = true\n')
    with pytest.raises(ConfigParseError) as info:
        SimulationHandler.initial_data(config)
    assert info.value.key == 's'


def test_missing_file():
    with pytest.raises(ConfigParseError):
        RunConfigFile.load('/nonexistent/run.conf')


def test_shipped_configs_parse():
    golden = RunConfigFile.load(CONFIGS / 'golden.conf')
    assert golden.integrator.tau_end == 2.0
    straight = RunConfigFile.load(CONFIGS / 'straight_line.conf')
    assert straight.pirani_project is True
    assert straight.integrator.method is IntegratorMethod.RK4_FIXED


def test_trajectory_csv_round_trip(tmp_path):
    result = SimulationHandler.run(RunConfigFile.parse_text(MINIMAL), seed=7)
    path = tmp_path / 'traj.csv'
    text = TrajectoryWriter.write(result.trajectory, OutputFormat.CSV, result.metadata, path=path)
    assert text.splitlines()[0] == ','.join(OutputConfig.CSV_COLUMNS)
    rows = TrajectoryReader.read_csv(path)
    assert rows.shape == (len(result.trajectory), len(OutputConfig.CSV_COLUMNS))
    assert np.array_equal(rows[:, 1:13], result.trajectory.states)


def test_trajectory_json_carries_metadata():
    result = SimulationHandler.run(RunConfigFile.parse_text(MINIMAL), seed=7)
    document = json.loads(TrajectoryWriter.to_json(result.trajectory, result.metadata))
    assert document['metadata']['seed'] == 7
    assert document['metadata']['artifact_version'] == OutputConfig.ARTIFACT_VERSION
    assert document['metadata']['method'] == 'rk45-adaptive'
    assert len(document['samples']) == len(result.trajectory)
    assert set(document['samples'][0]) == set(OutputConfig.CSV_COLUMNS)


def test_reader_rejects_foreign_header(tmp_path):
    path = tmp_path / 'other.csv'
    path.write_text('a,b\n1,2\n')
    with pytest.raises(ValueError):
        TrajectoryReader.read_csv(path)


def test_spin_tensor_file(tmp_path):
    path = tmp_path / 'spin.txt'
    path.write_text('0 0 0 0\n0 0 2 0  # S^12 = 2\n0 -2 0 0\n0 0 0 0\n')
    S = SpinFile.read_tensor(path)
    assert S.matrix[1, 2] == 2.0
    assert SpinFile.format_tensor(S).splitlines()[1].split()[2] == '2'


def test_spin_files_reject_bad_shapes(tmp_path):
    path = tmp_path / 'spin.txt'
    path.write_text('0 1 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n')
    with pytest.raises(ConfigParseError):
        SpinFile.read_tensor(path)
    path.write_text('1, 2, 3\n')
    with pytest.raises(ConfigParseError):
        SpinFile.read_vector(path)
    path.write_text('1 x 0 0\n')
    with pytest.raises(ConfigParseError):
        SpinFile.read_vector(path)


def test_spin_vector_file(tmp_path):
    path = tmp_path / 'vec.txt'
    path.write_text('0, 0,\n0, -1.5\n')
    s = SpinFile.read_vector(path)
    assert np.array_equal(s.c, [0.0, 0.0, 0.0, -1.5])
    assert SpinFile.format_vector(s) == '0 0 0 -1.5\n'
    assert SpinFile.format_tensor(SpinTensor()).count('\n') == 4


def test_format_number_keeps_full_precision():
    assert float(format_number(0.1 + 0.2)) == 0.1 + 0.2
