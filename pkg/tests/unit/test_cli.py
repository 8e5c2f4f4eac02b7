import pytest

import json

from sictomo.circuit import CircuitParams, SAMPLE_THETA_1
from sictomo.cli import cli_main, EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL


def _json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.startswith('{')]


def _run(capsys, args):
    code = cli_main(args)
    captured = capsys.readouterr()
    return code, _json_lines(captured.out), _json_lines(captured.err)


@pytest.fixture
def zero_theta_file(tmp_path):
    file = str(tmp_path/'zero_theta.json')
    CircuitParams((0, 0, 0), (0, 0, 0), simplified=True).to_file(file)
    return file


class TestSicCheckCommand:

    def test_canonical(self, capsys):
        code, out, _ = _run(capsys, ['sic-check'])
        assert code == EXIT_OK
        assert out[0]['is_sic'], 'Canonical measurement is a SIC'

    def test_theta_file(self, capsys, tmp_path):
        file = str(tmp_path/'theta.json')
        SAMPLE_THETA_1.to_file(file)
        code, out, _ = _run(capsys, ['sic-check', '--theta', file, '--tol', '1e-4'])
        assert code == EXIT_OK
        assert not out[0]['is_sic'], 'Random circuit is not a SIC'

    def test_circuit_and_theta_disagree(self, capsys, zero_theta_file):
        code, _, err = _run(capsys, ['sic-check', '--circuit', 'full', '--theta', zero_theta_file])
        assert code == EXIT_USAGE, 'A simplified theta file with --circuit full is a usage error'
        assert err[-1]['error'] == 'UsageError'


class TestQttfCommand:

    def test_canonical(self, capsys):
        code, out, _ = _run(capsys, ['qttf', '--quadrature', '32x32'])
        assert code == EXIT_OK
        assert abs(out[0]['qttf'] - 8.0) < 1e-3, 'qTTF of the SIC must be 8'

    def test_singular_measurement(self, capsys, zero_theta_file):
        code, _, err = _run(capsys, ['qttf', '--theta', zero_theta_file, '--quadrature', '8x8'])
        assert code == EXIT_NUMERICAL, 'A measurement of s_z alone has no finite qTTF'
        assert err[-1]['error'] == 'SingularMeasurementError'

    def test_bad_quadrature(self, capsys):
        code, _, _ = _run(capsys, ['qttf', '--quadrature', '64by64'])
        assert code == EXIT_USAGE

    def test_output_file(self, capsys, tmp_path):
        output = str(tmp_path/'qttf.json')
        code, out, _ = _run(capsys, ['qttf', '--quadrature', '8x8', '--output', output])
        assert code == EXIT_OK and out == [], 'Result goes to the file only'
        with open(output) as file:
            assert json.load(file)['quadrature'] == '8x8'
        code, _, _ = _run(capsys, ['qttf', '--quadrature', '8x8', '--output', output])
        assert code == EXIT_USAGE, 'Existing output needs --overwrite'


class TestEstimateCommand:

    def test_uniform_counts(self, capsys, tmp_path):
        file = tmp_path/'counts.json'
        file.write_text(json.dumps({'counts': [256, 256, 256, 256]}))
        code, out, _ = _run(capsys, ['estimate', '--counts', str(file)])
        assert code == EXIT_OK
        assert out[0]['shots'] == 1024
        for name in ('li', 'rpr'):
            entry = out[0]['estimates'][name]
            assert max(abs(entry[key]) for key in ('sx', 'sy', 'sz')) < 1e-9, \
                f'{name} must estimate the maximally mixed state'
        assert out[0]['estimates']['rpr']['converged']

    def test_bad_counts(self, capsys, tmp_path):
        file = tmp_path/'counts.json'
        file.write_text(json.dumps({'counts': [1, 2, 3]}))
        code, _, err = _run(capsys, ['estimate', '--counts', str(file)])
        assert code == EXIT_USAGE, 'Malformed counts are a usage error'
        assert err[-1]['error'] == 'ParameterError'

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = _run(capsys, ['estimate', '--counts', str(tmp_path/'missing.json')])
        assert code == EXIT_USAGE
        assert 'error' in err[-1]


class TestExperimentCommand:

    def test_reproducible_csv(self, capsys, tmp_path):
        config = tmp_path/'config.json'
        config.write_text(json.dumps({'states': ['z0', 'x0'], 'shots': 200, 'repetitions': 2}))
        contents = []
        for run in ('first', 'second'):
            output_dir = str(tmp_path/run)
            code, out, _ = _run(capsys, ['experiment', '--config', str(config), '--seed', '3', '--output-dir',
                                         output_dir])
            assert code == EXIT_OK
            assert out[0]['states'] == 2 and out[0]['failures'] == 0
            with open(out[0]['csv'], 'rb') as file:
                contents.append(file.read())
        assert contents[0] == contents[1], 'Same seed must give a byte identical results.csv'

    def test_overrides(self, capsys, tmp_path):
        output_dir = str(tmp_path/'run')
        code, out, _ = _run(capsys, ['experiment', '--shots', '50', '--reps', '2', '--estimator', 'li',
                                     '--project-pure', '--output-dir', output_dir])
        assert code == EXIT_OK
        with open(out[0]['json']) as file:
            content = json.load(file)
        assert content['config']['shots'] == 50 and content['config']['repetitions'] == 2
        assert content['config']['project_pure'], '--project-pure must reach the configuration'
        assert {row['estimator'] for row in content['rows']} == {'li', 'li_pure'}

    def test_unknown_config_key(self, capsys, tmp_path):
        config = tmp_path/'config.json'
        config.write_text(json.dumps({'shot': 10}))
        code, _, err = _run(capsys, ['experiment', '--config', str(config), '--output-dir', str(tmp_path)])
        assert code == EXIT_USAGE
        assert err[-1]['error'] == 'ParameterError'


class TestLogging:

    def test_log_level(self, capsys, tmp_path):
        code, out, _ = _run(capsys, ['--log-level', 'INFO', 'experiment', '--states', 'z0'])
        assert code == EXIT_USAGE, 'Unknown option is a usage error'
        code, out, _ = _run(capsys, ['--log-level', 'INFO', 'experiment', '--reps', '2', '--shots', '64',
                                     '--output-dir', str(tmp_path)])
        assert code == EXIT_OK
        assert len(out) == 1, 'Logging must not write to standard output'

    def test_bad_log_level(self, capsys):
        code, _, _ = _run(capsys, ['--log-level', 'LOUD', 'sic-check'])
        assert code == EXIT_USAGE


class TestErrorReport:

    @staticmethod
    def _stderr(capsys, args):
        code = cli_main(args)
        return code, capsys.readouterr().err.splitlines()

    def test_parameter_error_is_one_json_line(self, capsys, tmp_path):
        file = tmp_path/'counts.json'
        file.write_text(json.dumps({'counts': [1, 2, 3]}))
        code, lines = self._stderr(capsys, ['estimate', '--counts', str(file)])
        assert code == EXIT_USAGE
        assert len(lines) == 1, f'Standard error must hold only the JSON error line, got {lines}'
        assert json.loads(lines[0])['error'] == 'ParameterError'

    def test_numerical_error_is_one_json_line(self, capsys, zero_theta_file):
        code, lines = self._stderr(capsys, ['--log-level', 'DEBUG', 'qttf', '--theta', zero_theta_file,
                                            '--quadrature', '8x8'])
        assert code == EXIT_NUMERICAL
        errors = [line for line in lines if 'ERROR' in line or line.startswith('{')]
        assert len(errors) == 1, 'Errors are reported once, as JSON'
        assert json.loads(errors[0])['error'] == 'SingularMeasurementError'
