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

from . import Experiment, ExperimentResult
from ..config import ConfigError
from ..weights import (nazarov_pair, tensorize, large_doubling_variant,
                       TargetUnreachableError)
from ..diagnostics import (testing_report, gamma_horizontal, a2_dyadic,
                           adjacency_constant, is_flat)
from ..log import log
import numpy as np
import pandas as pd


def omega_point(x1, x3, tau, depth, tol):
    """Build the pair for one (x1, x3) and summarize it as a table row."""
    try:
        pair = nazarov_pair(x1, x3, tau, depth, tol)
    except TargetUnreachableError as exc:
        lo, hi = exc.bracket
        return x1, x3, np.nan, np.nan, np.nan, False, f'unreachable [{lo:.3g}, {hi:.3g}]'
    flat = (is_flat(adjacency_constant(pair.U), tau)
            and is_flat(adjacency_constant(pair.V), tau))
    return (x1, x3, pair.epsilon, pair.gamma, a2_dyadic(pair.U, pair.V),
            flat, 'ok')


class NazarovPairExperiment(Experiment):

    name = 'nazarov-pair'
    description = 'Flat pair with prescribed testing value and A2 at most one'
    priority = 20

    arguments = [
        ('x1', dict(
            type=float, default=0.5,
            help='mean of the cascade weight U (default: 0.5)')),
        ('x3', dict(
            type=float, default=0.1,
            help='target horizontal testing value, 0 < x3 < x1/4 (default: 0.1)')),
        ('tau', dict(
            type=float, default=0.9,
            help='flatness parameter tau in (0, 1) (default: 0.9)')),
        ('depth', dict(
            type=int, default=20,
            help='dyadic depth of the pair (default: 20)')),
        ('tol', dict(
            type=float, default=1e-8,
            help='bisection tolerance on the testing value (default: 1e-8)')),
        ('doubling_M', dict(
            type=float, default=10.0,
            help='mass ratio of the large-doubling neighbour (default: 10.0)')),
        ('grid', dict(
            type=int, default=0,
            help='points per axis of a scan over the admissible region; '
                 '0 disables it (default: 0)')),
    ]

    def __init__(self, x1, x3, tau, depth, tol, doubling_M, grid, _seed=None):
        self.x1 = x1
        self.x3 = x3
        self.tau = tau
        self.depth = depth
        self.tol = tol
        self.doubling_M = doubling_M
        self.grid = grid

    @classmethod
    def validate(cls, params):
        x1, x3 = params['x1'], params['x3']
        if not 0 < x1 < 1:
            raise ConfigError(f'x1={x1} must lie in (0, 1).')
        if not 0 < x3 < x1 / 4:
            raise ConfigError(f'(x1, x3) = ({x1}, {x3}) lies outside the region '
                              'Omega: x3 < x1/4 is required.')
        if not 0 < params['tau'] < 1:
            raise ConfigError(f'tau={params["tau"]} must lie in (0, 1).')
        if not 2 <= params['depth'] <= 24:
            raise ConfigError(f'depth={params["depth"]} must lie in 2..24.')
        if params['tol'] <= 0:
            raise ConfigError('tol must be positive.')
        if params['doubling_M'] < 1:
            raise ConfigError('doubling_M must be >= 1.')
        if params['grid'] < 0:
            raise ConfigError('grid must be >= 0.')

    def run(self, session):
        res = ExperimentResult(self.name)

        log.info(f'==> Building the pair for (x1, x3) = ({self.x1}, {self.x3})')
        pair = nazarov_pair(self.x1, self.x3, self.tau, self.depth, self.tol)
        report = testing_report(pair.U, pair.V)
        res.add('pair', 'epsilon', pair.epsilon)
        res.add('pair', 'blend', -1.0 if pair.blend is None else pair.blend)
        for name, value in report.entries():
            res.add('pair', name, value)

        res.check('pair.testing value hits x3',
                  abs(pair.gamma - self.x3) <= max(self.tol, 1e-6),
                  self.x3, pair.gamma)
        res.check('pair.a2_dyadic <= 1', report.a2_dyadic <= 1 + 1e-12,
                  1.0, report.a2_dyadic)
        res.check('pair.epsilon < tau/3', pair.epsilon < self.tau / 3,
                  self.tau / 3, pair.epsilon)
        for label, weight in (('U', pair.U), ('V', pair.V)):
            adj = adjacency_constant(weight)
            res.add('pair', f'adjacency_{label}', adj)
            res.check(f'pair.{label} is tau-flat', is_flat(adj, self.tau),
                      1 + self.tau, adj)
        res.check('pair.report consistent', not report.violations(),
                  [], report.violations())

        log.info('==> Tensorized pair')
        gamma_2d = gamma_horizontal(tensorize(pair.U, 2), tensorize(pair.V, 2))
        ratio = gamma_2d / pair.gamma
        res.add('tensor', 'gamma', gamma_2d)
        res.add('tensor', 'gamma_ratio', ratio)
        res.check('tensor.testing value is preserved', abs(ratio - 1) <= 1e-12,
                  1.0, ratio)

        log.info(f'==> Large-doubling variant, M={self.doubling_M}')
        V2, U2 = large_doubling_variant(pair.V, pair.U, self.doubling_M)
        doubling = adjacency_constant(U2)
        glued = gamma_horizontal(U2, V2)
        res.add('large_doubling', 'adjacency', doubling)
        res.add('large_doubling', 'gamma', glued)
        res.add('large_doubling', 'a2_dyadic', a2_dyadic(U2, V2))
        res.check('large_doubling.adjacency reaches M',
                  doubling >= self.doubling_M * (1 - 1e-12),
                  self.doubling_M, doubling)
        res.check('large_doubling.testing value at least half',
                  glued >= 0.5 * pair.gamma * (1 - 1e-12), 0.5 * pair.gamma, glued)

        if self.grid > 0:
            n = self.grid
            tasks = []
            for i in range(n):
                x1 = (i + 0.5) / n
                for j in range(n):
                    x3 = (j + 0.5) / n * x1 / 4
                    tasks.append((omega_point, (x1, x3, self.tau, self.depth,
                                                self.tol)))
            rows = session.run(tasks, 'Region scan')
            table = pd.DataFrame(rows, columns=[
                'x1', 'x3', 'epsilon', 'gamma', 'a2_dyadic', 'flat', 'status'])
            res.add_table('omega_scan', table)
            reached = table[table.status == 'ok']
            res.add('omega_scan', 'reached', len(reached))
            res.add('omega_scan', 'points', len(table))
            res.check('omega_scan.A2 bounded on every reached point',
                      bool((reached.a2_dyadic <= 1 + 1e-12).all()), 1.0,
                      float(reached.a2_dyadic.max()) if len(reached) else 0.0)

        return res
