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

"""Golden values: stored report entries and tolerance-aware comparison."""

from collections import namedtuple
from fnmatch import fnmatchcase
import json
import math

from .config import DEFAULT_TOLERANCE

Mismatch = namedtuple('Mismatch', ['entry', 'expected', 'got', 'tol'])

ROUNDED_KINDS = ('quadrature', 'monte-carlo')


def golden_value(value, kind):
    if kind in ROUNDED_KINDS:
        return float(f'{value:.12g}')
    return value


def write_golden(entries, path):
    data = {e.entry: golden_value(e.value, e.kind) for e in entries}
    with open(path, 'w') as f:
        json.dump(data, f, indent=2)
        f.write('\n')
    return data


def tolerance_for(entry, tolerances):
    for pattern, tol in tolerances.items():
        if pattern != 'default' and fnmatchcase(entry, pattern):
            return float(tol)
    return float(tolerances.get('default', DEFAULT_TOLERANCE))


def within(expected, got, tol):
    if isinstance(expected, bool) or isinstance(got, bool):
        return expected == got
    if isinstance(expected, (int, float)) and isinstance(got, (int, float)):
        if math.isnan(expected) or math.isnan(got):
            return math.isnan(expected) and math.isnan(got)
        return abs(got - expected) <= tol * max(1.0, abs(expected))
    return expected == got


def check_golden(entries, path, tolerances):
    with open(path) as f:
        expected = json.load(f)
    got = {e.entry: e.value for e in entries}

    mismatches = []
    for name, value in expected.items():
        tol = tolerance_for(name, tolerances)
        if name not in got:
            mismatches.append(Mismatch(name, value, None, tol))
        elif not within(value, got[name], tol):
            mismatches.append(Mismatch(name, value, got[name], tol))
    return mismatches
