import json
import math
import pytest

from rieszlab.config import (ConfigError, DEFAULT_TOLERANCE, load_config,
                             read_experiment_config, validate_config)
from rieszlab.presets import dump_to_preset, load_preset
from rieszlab.golden import check_golden, tolerance_for, within, write_golden
from rieszlab.experiments import ExperimentResult


def config_data(kind, **params):
    return {'schema_version': 1, 'kind': kind, 'seed': 1, 'params': params}


def test_defaults_are_filled(experiments):
    config = validate_config(config_data('cascade-study'), experiments)
    assert config.params['depth'] == 12
    assert config.params['growth_depths'] == [2, 4, 6, 8, 10, 12]
    assert config.tolerances == {'default': DEFAULT_TOLERANCE}
    assert config.golden is None


def test_values_are_coerced(experiments):
    config = validate_config(config_data('cascade-study', depth='8',
                                         growth_depths=4), experiments)
    assert config.params['depth'] == 8
    assert config.params['growth_depths'] == [4]


def test_point_outside_the_region(experiments):
    with pytest.raises(ConfigError, match='Omega'):
        validate_config(config_data('nazarov-pair', x1=0.5, x3=0.2), experiments)


@pytest.mark.parametrize('change', [
    {'seed': None},
    {'seed': 1.5},
    {'schema_version': 2},
    {'kind': 'bellman'},
    {'comment': 'stray key'},
    {'params': {'alpha': 1}},
    {'params': {'depth': 'deep'}},
    {'params': {'epsilon': 1.0}},
    {'tolerances': {'cascade.*': -1}},
])
def test_invalid_configurations(experiments, change):
    data = config_data('cascade-study')
    data.update(change)
    with pytest.raises(ConfigError):
        validate_config(data, experiments)


def test_choices_are_checked(experiments):
    with pytest.raises(ConfigError, match='must be one of'):
        validate_config(config_data('transplant', source='flat'), experiments)


def test_extension_window_must_be_dyadic(experiments):
    with pytest.raises(ConfigError, match='power of two'):
        validate_config(config_data('transplant', extension_L=6), experiments)
    config = validate_config(config_data('transplant', extension_L=4), experiments)
    assert config.params['jumps'] == [3, 3, 3]


def test_kind_aliases():
    assert load_preset('{"kind": "nazarov"}')['kind'] == 'nazarov-pair'
    assert load_preset('{"kind": "transplant"}')['kind'] == 'transplant'


def test_reading_configuration_files(tmp_path):
    with pytest.raises(ConfigError, match='does not exist'):
        read_experiment_config(tmp_path / 'missing.json')

    broken = tmp_path / 'broken.json'
    broken.write_text('{"kind": ')
    with pytest.raises(ConfigError, match='not valid JSON'):
        read_experiment_config(broken)

    listing = tmp_path / 'list.json'
    listing.write_text('[1, 2]')
    with pytest.raises(ConfigError):
        read_experiment_config(listing)

    assert load_config(tmp_path / 'absent.json') == {}


def test_saved_parameters_reproduce_the_configuration(experiments):
    config = validate_config(config_data('pushforward-study', maps=5), experiments)
    again = validate_config(json.loads(dump_to_preset(config)), experiments)
    assert again == config


def test_tolerance_patterns():
    tolerances = {'hitting.*': 1e-2, 'default': 1e-9}
    assert tolerance_for('hitting.estimate', tolerances) == 1e-2
    assert tolerance_for('cascade.gamma', tolerances) == 1e-9
    assert tolerance_for('cascade.gamma', {}) == DEFAULT_TOLERANCE


def test_within():
    assert within(1.0, 1.0 + 1e-10, 1e-9)
    assert not within(1.0, 1.01, 1e-9)
    assert within(1000.0, 1000.0 + 1e-7, 1e-9)
    assert within(math.nan, math.nan, 0.0)
    assert not within(True, False, 1.0)


def sample_result(gamma):
    res = ExperimentResult('sample')
    res.add('cascade', 'gamma', gamma)
    res.add('cascade', 'flat', True)
    res.add('hitting', 'estimate', 0.12345678901234567, 'monte-carlo')
    return res


def test_golden_round_trip(tmp_path):
    path = tmp_path / 'golden.json'
    stored = write_golden(sample_result(0.25).entries, path)
    assert stored['hitting.estimate'] == 0.123456789012
    assert check_golden(sample_result(0.25).entries, path, {'default': 1e-9}) == []


def test_golden_mismatches(tmp_path):
    path = tmp_path / 'golden.json'
    write_golden(sample_result(0.25).entries, path)
    mismatches = check_golden(sample_result(0.26).entries, path,
                              {'cascade.gamma': 0.0, 'default': 1e-9})
    assert [m.entry for m in mismatches] == ['cascade.gamma']
    assert mismatches[0].expected == 0.25
    assert mismatches[0].got == 0.26

    short = ExperimentResult('sample')
    short.add('cascade', 'gamma', 0.25)
    missing = check_golden(short.entries, path, {'default': 1e-9})
    assert [m.entry for m in missing] == ['cascade.flat', 'hitting.estimate']
    assert all(m.got is None for m in missing)
