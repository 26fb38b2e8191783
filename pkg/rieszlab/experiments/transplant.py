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

from fractions import Fraction
from . import Experiment, ExperimentResult, int_list, float_list
from ..config import ConfigError
from ..dyadic import JumpSchedule
from ..weights import CascadeParams, cascade, nazarov_pair, tensorize
from ..transplant import (transplant, modified_transplant, law_residual,
                          supervisor_law_residual, global_extension)
from ..diagnostics import (adjacency_constant, is_flat, a2_adjacent_unions,
                           halo_mass)
from ..log import log
import numpy as np
import pandas as pd


def extension_row(sigma, omega, tau, L):
    ext = global_extension(sigma, omega, tau, L)
    adjacency = max(adjacency_constant(ext.sigma, 'touching'),
                    adjacency_constant(ext.omega, 'touching'))
    factors = ext.factors.dense()
    return tau, adjacency, 1 + 5 * tau, float(factors.max() / factors.min()), ext.tail


class TransplantExperiment(Experiment):

    name = 'transplant'
    description = 'Supervisor transplantation, modified transplantation and global extension'
    priority = 30

    arguments = [
        ('source', dict(
            type=str, default='cascade', choices=['cascade', 'nazarov'],
            help='source pair: tensorized cascades or the Nazarov pair '
                 '(default: cascade)')),
        ('a', dict(
            type=float, default=0.5,
            help='cascade mean of the sigma source (default: 0.5)')),
        ('epsilon', dict(
            type=float, default=0.05,
            help='cascade strength (default: 0.05)')),
        ('x1', dict(
            type=float, default=0.5,
            help='Nazarov pair x1 (default: 0.5)')),
        ('x3', dict(
            type=float, default=0.1,
            help='Nazarov pair x3 (default: 0.1)')),
        ('tau', dict(
            type=float, default=0.5,
            help='flatness parameter for the modified transplant (default: 0.5)')),
        ('depth', dict(
            type=int, default=8,
            help='dyadic depth of the sources (default: 8)')),
        ('jumps', dict(
            type=int_list, default=[3, 3, 3],
            help='jump schedule k_1, ..., k_m (default: [3, 3, 3])')),
        ('halo_levels', dict(
            type=int_list, default=[3, 4, 5, 6, 7],
            help='halo widths 2^-j of the mass profile (default: [3, 4, 5, 6, 7])')),
        ('extension_taus', dict(
            type=float_list, default=[0.05, 0.1, 0.2],
            help='tau values of the global extension (default: [0.05, 0.1, 0.2])')),
        ('extension_L', dict(
            type=int, default=8,
            help='half-width of the global extension window (default: 8)')),
        ('extension_stage', dict(
            type=int, default=1,
            help='transplant stage fed to the global extension (default: 1)')),
    ]

    def __init__(self, source, a, epsilon, x1, x3, tau, depth, jumps, halo_levels,
                 extension_taus, extension_L, extension_stage, _seed=None):
        self.source = source
        self.a = a
        self.epsilon = epsilon
        self.x1 = x1
        self.x3 = x3
        self.tau = tau
        self.depth = depth
        self.jumps = jumps
        self.halo_levels = halo_levels
        self.extension_taus = extension_taus
        self.extension_L = extension_L
        self.extension_stage = extension_stage

    @classmethod
    def validate(cls, params):
        if not 0 < params['epsilon'] < 1:
            raise ConfigError(f'epsilon={params["epsilon"]} must lie in (0, 1).')
        if params['source'] == 'nazarov' and not 0 < params['x3'] < params['x1'] / 4:
            raise ConfigError(f'(x1, x3) = ({params["x1"]}, {params["x3"]}) lies '
                              'outside the region Omega: x3 < x1/4 is required.')
        if not 0 < params['tau'] < 1:
            raise ConfigError(f'tau={params["tau"]} must lie in (0, 1).')
        jumps = params['jumps']
        if not jumps or min(jumps) < 1:
            raise ConfigError('jumps must be a nonempty list of positive integers.')
        if len(jumps) > params['depth']:
            raise ConfigError(f'{len(jumps)} stages need a source depth of at '
                              f'least {len(jumps)}.')
        if sum(jumps) > 10:
            raise ConfigError(f'Cumulative depth {sum(jumps)} is too fine for '
                              'the planar build (at most 10).')
        if any(not 0 < j for j in params['halo_levels']):
            raise ConfigError('halo_levels must be positive.')
        if any(not 0 < t < 1 for t in params['extension_taus']):
            raise ConfigError('extension_taus must lie in (0, 1).')
        if not 0 <= params['extension_stage'] <= len(jumps):
            raise ConfigError(f'extension_stage must lie in 0..{len(jumps)}.')
        L = params['extension_L']
        if L < 1 or L & (L - 1):
            raise ConfigError(f'extension_L={L} must be a power of two (the '
                              'window [-L, L) is a dyadic root).')

    def sources(self):
        if self.source == 'nazarov':
            pair = nazarov_pair(self.x1, self.x3, self.tau, self.depth)
            return tensorize(pair.U, 2), tensorize(pair.V, 2)
        return (tensorize(cascade(CascadeParams(self.a, self.epsilon, self.depth)), 2),
                tensorize(cascade(CascadeParams(1.0, -self.epsilon, self.depth)), 2))

    def run(self, session):
        res = ExperimentResult(self.name)
        sigma, omega = self.sources()
        root = sigma.root
        schedule = JumpSchedule(self.jumps)

        log.info(f'==> Transplanting along {schedule}')
        state_v = transplant(root, schedule, sigma)
        state_u = transplant(root, schedule, omega)
        for label, state in (('v', state_v), ('u', state_u)):
            sup = supervisor_law_residual(state)
            const = law_residual(state)
            res.add('transplant', f'supervisor_residual_{label}', sup)
            res.add('transplant', f'law_residual_{label}', const)
            res.check(f'transplant.supervisor law holds for {label}', sup <= 1e-12,
                      0.0, sup)
            res.check(f'transplant.stages constant between jumps for {label}',
                      const <= 1e-12, 0.0, const)
            final = state.stage().dense()
            lo, hi = state.source.dense().min(), state.source.dense().max()
            res.check(f'transplant.{label} bounded by the source',
                      bool(final.min() >= lo - 1e-12 and final.max() <= hi + 1e-12),
                      [float(lo), float(hi)], [float(final.min()), float(final.max())])

        m = min(self.depth, 6)
        unit = transplant(root, JumpSchedule([1] * m), sigma)
        same = bool(np.array_equal(unit.stage().dense(), sigma.averages(m)))
        res.add('transplant', 'unit_schedule_is_projection', same)
        res.check('transplant.unit jumps reproduce the martingale averages', same,
                  True, same)

        log.info('==> Modified transplantation')
        mod_v = modified_transplant(state_v)
        mod_u = modified_transplant(state_u)
        for label, state, plain in (('v', mod_v, state_v), ('u', mod_u, state_u)):
            siblings = adjacency_constant(state.stage(), 'siblings')
            touching = adjacency_constant(state.stage(), 'touching')
            before = adjacency_constant(plain.stage(), 'touching')
            res.add('modified', f'adjacency_siblings_{label}', siblings)
            res.add('modified', f'adjacency_touching_{label}', touching)
            res.add('modified', f'adjacency_plain_{label}', before)
            res.check(f'modified.{label} adjacent ratios inside (1-tau, 1+tau)',
                      is_flat(touching, self.tau), 1 + self.tau, touching)
            res.check(f'modified.{label} flatter than the plain transplant',
                      touching <= before, before, touching)
        unions = a2_adjacent_unions(mod_v.stage(), mod_u.stage())
        res.add('modified', 'a2_adjacent_unions', unions)
        res.check('modified.products over adjacent unions <= 81', unions <= 81,
                  81.0, unions)

        log.info('==> Halo mass profile')
        W = state_u.stage()
        rows = []
        for j in self.halo_levels:
            delta = Fraction(1, 1 << j)
            mass = halo_mass(W, root, delta)
            rows.append((j, float(delta), mass, mass * np.log(1 / float(delta))))
        halo = pd.DataFrame(rows, columns=['level', 'delta', 'mass', 'mass_log'])
        res.add_table('halo', halo)
        res.add('halo', 'constant', float(halo.mass_log.max()))
        decreasing = bool((np.diff(halo.mass.values) < 0).all())
        res.check('halo.mass decreases with delta', decreasing, True, decreasing)

        log.info(f'==> Global extension on [-{self.extension_L}, {self.extension_L}]^2')
        s = self.extension_stage
        tasks = [(extension_row, (state_v.stage(s), state_u.stage(s), tau,
                                  self.extension_L))
                 for tau in self.extension_taus]
        rows = session.run(tasks, 'Global extension')
        ext = pd.DataFrame(rows, columns=['tau', 'adjacency', 'bound',
                                          'factor_ratio', 'tail'])
        res.add_table('global_extension', ext)
        for row in ext.itertuples():
            res.add('global_extension', f'adjacency[{row.tau:g}]', row.adjacency)
            res.add('global_extension', f'tail[{row.tau:g}]', row.tail)
            res.check(f'global_extension.adjacency <= 1+5tau at tau={row.tau:g}',
                      row.adjacency <= row.bound, row.bound, row.adjacency)
        return res
