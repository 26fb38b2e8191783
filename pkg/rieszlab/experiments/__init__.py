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

import abc
from collections import namedtuple
import numpy as np

Entry = namedtuple('Entry', ['section', 'entry', 'value', 'kind'])
Check = namedtuple('Check', ['name', 'passed', 'expected', 'got'])

ENTRY_KINDS = ('exact', 'quadrature', 'monte-carlo')


def int_list(value):
    if isinstance(value, (int, float)):
        value = [value]
    return [int(v) for v in value]


def float_list(value):
    if isinstance(value, (int, float)):
        value = [value]
    return [float(v) for v in value]


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


class ExperimentResult:

    def __init__(self, name):
        self.name = name
        self.entries = []
        self.tables = {}
        self.checks = []

    def add(self, section, name, value, kind='exact'):
        if kind not in ENTRY_KINDS:
            raise ValueError(f'Unknown entry kind {kind!r}.')
        self.entries.append(Entry(section, f'{section}.{name}', _plain(value), kind))

    def add_table(self, name, table):
        self.tables[name] = table

    def check(self, name, passed, expected=None, got=None):
        self.checks.append(Check(name, bool(passed), _plain(expected), _plain(got)))

    def failed_checks(self):
        return [c for c in self.checks if not c.passed]


class Experiment(abc.ABC):

    name = 'noname'
    description = 'no description'

    # Listing order in the configuration banner and the help text
    priority = 99

    # If True, the configuration must provide a seed.
    uses_seed = False

    # Parameters read from the "params" section of the configuration
    arguments = []

    @classmethod
    def validate(cls, params):
        """Raise ConfigError on parameter combinations outside the domain."""

    def __call__(self, session):
        try:
            return self.run(session)
        except KeyboardInterrupt:
            return None

    @abc.abstractmethod
    def run(self, session):
        raise NotImplementedError


def discover_experiments():
    from . import __path__, __name__
    import pkgutil
    import importlib

    experiments = {}

    def scan_module(mod):
        for objname in dir(mod):
            obj = getattr(mod, objname)
            if (obj is not Experiment and type(obj) == abc.ABCMeta and
                    issubclass(obj, Experiment)):
                experiments[obj.name] = obj

    for modinfo in pkgutil.iter_modules(__path__):
        modname = f'{__name__}.{modinfo.name}'
        mod = importlib.import_module(modname)
        scan_module(mod)

    return experiments
