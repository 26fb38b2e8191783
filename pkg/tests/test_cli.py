import json
import pytest

from rieszlab.__main__ import run_rieszlab
from rieszlab.experiments.cascade_study import CascadeStudy
from rieszlab.quadrature import QuadratureError

REDUCED_CASCADE = {
    'schema_version': 1,
    'kind': 'cascade',
    'seed': 7,
    'params': {'depth': 6, 'stop_depth': 8, 'trials': 0, 'growth_depths': [2, 3]},
}


@pytest.fixture
def write_config(tmp_path):
    def write(data, name='config.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return write


def rieszlab(config, out, *options):
    return run_rieszlab(['--config', config, '-o', str(out), '-q', '-t', '1',
                         *options])


def test_run_writes_the_report(tmp_path, write_config):
    out = tmp_path / 'out'
    assert rieszlab(write_config(REDUCED_CASCADE), out) == 0
    for name in ('report.csv', 'report.json', 'parameters.json', 'report.html',
                 'log.txt', 'growth.csv', 'stopping_profile.csv'):
        assert (out / name).exists()
    report = json.loads((out / 'report.json').read_text())
    assert report['kind'] == 'cascade-study'
    assert all(check['passed'] for check in report['checks'])
    saved = json.loads((out / 'parameters.json').read_text())
    assert saved['params']['depth'] == 6


def test_reports_are_reproducible(tmp_path, write_config):
    config = write_config(REDUCED_CASCADE)
    assert rieszlab(config, tmp_path / 'a') == 0
    assert rieszlab(config, tmp_path / 'b') == 0
    assert ((tmp_path / 'a' / 'report.json').read_bytes()
            == (tmp_path / 'b' / 'report.json').read_bytes())


def test_configuration_error(tmp_path, write_config):
    config = write_config({'schema_version': 1, 'kind': 'nazarov-pair',
                           'params': {'x1': 0.5, 'x3': 0.2}})
    out = tmp_path / 'out'
    assert rieszlab(config, out) == 2
    assert not out.exists()


def test_existing_output_directory(tmp_path, write_config):
    out = tmp_path / 'out'
    out.mkdir()
    config = write_config(REDUCED_CASCADE)
    assert rieszlab(config, out) == 1
    assert rieszlab(config, out, '--overwrite') == 0


def test_golden_values(tmp_path, write_config):
    config = write_config(dict(REDUCED_CASCADE, golden='golden.json'))
    assert rieszlab(config, tmp_path / 'write', '--golden', 'write') == 0
    golden = tmp_path / 'golden.json'
    assert golden.exists()
    assert rieszlab(config, tmp_path / 'check', '--golden', 'check') == 0

    stored = json.loads(golden.read_text())
    stored['cascade.gamma'] += 1e-3
    golden.write_text(json.dumps(stored))
    assert rieszlab(config, tmp_path / 'drift', '--golden', 'check') == 3


def test_missing_golden_file(tmp_path, write_config):
    config = write_config(dict(REDUCED_CASCADE, golden='absent.json'))
    assert rieszlab(config, tmp_path / 'out', '--golden', 'check') == 2


def test_golden_file_defaults_to_the_output_directory(tmp_path, write_config):
    out = tmp_path / 'out'
    assert rieszlab(write_config(REDUCED_CASCADE), out, '--golden', 'write') == 0
    assert (out / 'golden.json').exists()


@pytest.mark.parametrize('error, status', [
    (QuadratureError('R1 testing did not reach tolerance 1e-12'), 3),
    (ValueError('Stage 2 needs cumulative depth 20'), 1),
])
def test_experiment_errors_map_to_exit_codes(tmp_path, write_config, monkeypatch,
                                             error, status):
    def fail(self, session):
        raise error

    monkeypatch.setattr(CascadeStudy, 'run', fail)
    out = tmp_path / 'out'
    assert rieszlab(write_config(REDUCED_CASCADE), out) == status
    assert not (out / 'report.json').exists()
