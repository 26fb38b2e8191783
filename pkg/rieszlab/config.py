#
# RieszLab
#
# Copyright 2024 Seoul National University
#
# Permission is hereby granted, free of charge, to any person obtaining
# a copy of this software and associated documentation files (the
# “Software”), to deal in the Software without restriction, including
# without limitation the rights to use, copy, modify, merge, publish,
# distribute, sublicense, and/or sell copies of the Software, and to
# permit persons to whom the Software is furnished to do so, subject to
# the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN
# NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM,
# DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR
# OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR
# THE USE OR OTHER DEALINGS IN THE SOFTWARE.
#

import json
import os
from collections import namedtuple

SCHEMA_VERSION = 1
DEFAULT_TOLERANCE = 1e-9

default_configfile = os.path.join(
    os.path.expanduser('~'), '.config', 'rieszlab', 'config.json')

ExperimentConfig = namedtuple('ExperimentConfig', [
    'schema_version', 'kind', 'seed', 'params', 'tolerances', 'golden'])


class ConfigError(ValueError):
    pass


def load_config(configfile=default_configfile):
    try:
        return json.load(open(configfile))
    except (FileNotFoundError, PermissionError):
        return {}


def read_experiment_config(path):
    from .presets import load_preset

    try:
        with open(path) as f:
            data = load_preset(f.read())
    except FileNotFoundError:
        raise ConfigError(f'Configuration file {path} does not exist.')
    except json.JSONDecodeError as exc:
        raise ConfigError(f'Configuration file {path} is not valid JSON: {exc}')
    if not isinstance(data, dict):
        raise ConfigError('The configuration must be a JSON object.')
    return data


def coerce_params(experiment, params):
    """Fill declared defaults and coerce the given values to declared types."""
    declared = dict(experiment.arguments)
    unknown = sorted(set(params) - set(declared))
    if unknown:
        raise ConfigError(f'Unknown parameters for {experiment.name}: '
                          f'{", ".join(unknown)}')

    filled = {}
    for argname, argopts in experiment.arguments:
        if argname not in params:
            filled[argname] = argopts.get('default')
            continue
        value = params[argname]
        if value is None or 'type' not in argopts:
            filled[argname] = value
            continue
        try:
            filled[argname] = argopts['type'](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f'Parameter {argname} of {experiment.name}: {exc}')
        if 'choices' in argopts and filled[argname] not in argopts['choices']:
            raise ConfigError(f'Parameter {argname} must be one of '
                              f'{", ".join(map(str, argopts["choices"]))}.')
    return filled


def validate_config(data, experiments):
    version = data.get('schema_version')
    if version != SCHEMA_VERSION:
        raise ConfigError(f'Unsupported schema_version {version!r}; '
                          f'expected {SCHEMA_VERSION}.')

    kind = data.get('kind')
    if kind not in experiments:
        raise ConfigError(f'Unknown experiment kind {kind!r}; choose from '
                          f'{", ".join(sorted(experiments))}.')
    experiment = experiments[kind]

    unknown = sorted(set(data) - set(ExperimentConfig._fields))
    if unknown:
        raise ConfigError(f'Unknown configuration keys: {", ".join(unknown)}')

    seed = data.get('seed')
    if experiment.uses_seed and seed is None:
        raise ConfigError(f'The {kind} experiment draws random numbers; '
                          'a seed is required.')
    if seed is not None and not isinstance(seed, int):
        raise ConfigError('The seed must be an integer.')

    tolerances = dict(data.get('tolerances') or {})
    tolerances.setdefault('default', DEFAULT_TOLERANCE)
    for pattern, tol in tolerances.items():
        if not isinstance(tol, (int, float)) or tol < 0:
            raise ConfigError(f'Tolerance for {pattern!r} must be a '
                              'nonnegative number.')

    params = coerce_params(experiment, data.get('params') or {})
    experiment.validate(params)

    return ExperimentConfig(SCHEMA_VERSION, kind, seed, params, tolerances,
                            data.get('golden'))
