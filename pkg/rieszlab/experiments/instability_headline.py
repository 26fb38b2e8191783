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
from ..weights import nazarov_pair, tensorize
from ..transplant import adaptive_schedule
from ..singular import KernelSpec
from ..diagnostics import riesz_testing, testing_scan, rotation_swap
from ..log import log
import pandas as pd


class InstabilityHeadline(Experiment):

    name = 'instability-headline'
    description = 'Growth of R1 testing under transplantation while R2 stays bounded'
    priority = 40

    arguments = [
        ('x1', dict(
            type=float, default=0.5,
            help='mean of the cascade weight (default: 0.5)')),
        ('x3', dict(
            type=float, default=0.1,
            help='testing value of the one-dimensional pair (default: 0.1)')),
        ('tau', dict(
            type=float, default=0.9,
            help='flatness parameter (default: 0.9)')),
        ('depth', dict(
            type=int, default=12,
            help='dyadic depth of the one-dimensional pair (default: 12)')),
        ('stages', dict(
            type=int, default=3,
            help='number of transplantation stages (default: 3)')),
        ('k_min', dict(
            type=int, default=2,
            help='first jump tried at every stage (default: 2)')),
        ('residual_fraction', dict(
            type=float, default=0.1,
            help='accepted ratio of discrepancy residual to the diagonal '
                 '(default: 0.1)')),
        ('cap', dict(
            type=int, default=12,
            help='largest cumulative depth of the jump grid (default: 12)')),
        ('tol', dict(
            type=float, default=1e-6,
            help='quadrature tolerance of the testing integrals (default: 1e-6)')),
        ('scan_depth', dict(
            type=int, default=2,
            help='dyadic levels of the R2 testing scan (default: 2)')),
        ('swap_depth', dict(
            type=int, default=1,
            help='dyadic levels of the quarter-turn check (default: 1)')),
        ('swap_tol', dict(
            type=float, default=1e-6,
            help='allowed relative deviation of the quarter-turn swap '
                 '(default: 1e-6)')),
    ]

    def __init__(self, x1, x3, tau, depth, stages, k_min, residual_fraction, cap,
                 tol, scan_depth, swap_depth, swap_tol, _seed=None):
        self.x1 = x1
        self.x3 = x3
        self.tau = tau
        self.depth = depth
        self.stages = stages
        self.k_min = k_min
        self.residual_fraction = residual_fraction
        self.cap = cap
        self.tol = tol
        self.scan_depth = scan_depth
        self.swap_depth = swap_depth
        self.swap_tol = swap_tol

    @classmethod
    def validate(cls, params):
        if not 0 < params['x1'] < 1:
            raise ConfigError(f'x1={params["x1"]} must lie in (0, 1).')
        if not 0 < params['x3'] < params['x1'] / 4:
            raise ConfigError(f'(x1, x3) = ({params["x1"]}, {params["x3"]}) lies '
                              'outside the region Omega: x3 < x1/4 is required.')
        if not 0 < params['tau'] < 1:
            raise ConfigError(f'tau={params["tau"]} must lie in (0, 1).')
        if not 1 <= params['stages'] <= params['depth']:
            raise ConfigError('stages must lie in 1..depth.')
        if params['k_min'] < 1:
            raise ConfigError('k_min must be positive.')
        if params['stages'] * params['k_min'] > params['cap']:
            raise ConfigError(f'{params["stages"]} stages of k_min={params["k_min"]} '
                              f'exceed the depth cap {params["cap"]}.')
        if params['tol'] <= 0 or params['swap_tol'] < 0:
            raise ConfigError('Tolerances must be positive.')
        if params['residual_fraction'] <= 0:
            raise ConfigError('residual_fraction must be positive.')

    def run(self, session):
        res = ExperimentResult(self.name)
        r1, r2 = KernelSpec.riesz(1, 2), KernelSpec.riesz(2, 2)

        log.info(f'==> Building the planar pair (x1={self.x1}, x3={self.x3})')
        pair = nazarov_pair(self.x1, self.x3, self.tau, self.depth)
        sigma, omega = tensorize(pair.U, 2), tensorize(pair.V, 2)
        res.add('pair', 'epsilon', pair.epsilon)
        res.add('pair', 'gamma', pair.gamma)

        log.info(f'==> Adaptive schedule over {self.stages} stages')
        adaptive = adaptive_schedule(
            sigma, omega, self.stages, k_min=self.k_min,
            residual_fraction=self.residual_fraction, cap=self.cap,
            tol=self.tol, executor=session.executor)
        state_v, state_u = adaptive.state_v, adaptive.state_u
        res.add('schedule', 'jumps', ','.join(map(str, adaptive.schedule.jumps)))
        res.add_table('trials', pd.DataFrame(
            [(t, k, d.total, d.A, d.B, d.C, d.D, d.diagonal, d.residual)
             for t, k, d in adaptive.trials],
            columns=['stage', 'k', 'total', 'A', 'B', 'C', 'D', 'diagonal',
                     'residual']))
        # the last trial of every stage is the accepted one
        accepted = {t: d for t, _, d in adaptive.trials}

        log.info('==> Testing integrals per stage')
        rows = []
        for t in range(state_v.t + 1):
            v, u = state_v.stage(t), state_u.stage(t)
            T1 = riesz_testing(r1, v, u, tol=self.tol)
            T2 = riesz_testing(r2, v, u, tol=self.tol)
            disc = accepted.get(t - 1)
            rows.append((t, state_v.schedule.cumulative(t), T1.value, T1.error,
                         T2.value, T2.error, T1.mass,
                         disc.diagonal if disc else 0.0,
                         disc.total if disc else 0.0))
        table = pd.DataFrame(rows, columns=[
            'stage', 'level', 'R1', 'R1_error', 'R2', 'R2_error', 'mass',
            'diagonal', 'discrepancy'])
        res.add_table('stages', table)
        for row in table.itertuples():
            res.add('stages', f'R1[{row.stage}]', row.R1, 'quadrature')
            res.add('stages', f'R2[{row.stage}]', row.R2, 'quadrature')

        mass = table.mass.iloc[0]
        growth = table.R1.iloc[-1] - table.R1.iloc[0]
        predicted = table.diagonal.sum() / mass
        res.add('headline', 'R1_growth', growth, 'quadrature')
        res.add('headline', 'predicted_growth', predicted, 'quadrature')
        res.check('headline.R1 growth reaches 80% of the diagonal prediction',
                  growth >= 0.8 * predicted, 0.8 * predicted, growth)

        log.info(f'==> R2 testing scan to level {self.scan_depth}')
        baseline = table.R2.iloc[0]
        scan = testing_scan(r2, state_v.stage(), state_u.stage(), self.scan_depth,
                            tol=self.tol, executor=session.executor)
        res.add_table('r2_scan', scan)
        bound = 1.1 * (1 + self.tau) ** 3 * baseline
        worst = float(scan.value.max())
        res.add('headline', 'R2_scan_max', worst, 'quadrature')
        res.add('headline', 'R2_bound', bound, 'quadrature')
        res.check('headline.R2 testing stays bounded over the scan',
                  worst <= bound, bound, worst)

        log.info('==> Quarter-turn swap of the testing tables')
        swap, deviation = rotation_swap(state_v.stage(), state_u.stage(),
                                        self.swap_depth, tol=self.tol,
                                        executor=session.executor)
        res.add_table('rotation_swap', swap)
        scale = max(1.0, float(swap[['R1', 'R2']].abs().values.max()))
        res.add('headline', 'swap_deviation', deviation, 'quadrature')
        res.check('headline.quarter turn swaps R1 and R2',
                  deviation <= self.swap_tol * scale, self.swap_tol * scale,
                  deviation)
        return res
