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
from ..weights import CascadeParams, cascade, tensorize
from ..measure import Measure
from ..pushforward import (PLMap1D, ComposedMap, RotationMap, PowerMap,
                           MASS_RULES, pushforward, lattice_intervals,
                           a2_stability_check, random_pl_map,
                           homeo_condition_check, cantor_instability_demo)
from ..log import log
import numpy as np
import pandas as pd


def stability_row(index, sigma, omega, phi, scan):
    check = a2_stability_check(sigma, omega, phi, scan)
    return (index, phi.bilipschitz_norm(), len(phi.xs) - 1, check.before,
            check.after, check.bound, check.constant)


class PushforwardStudy(Experiment):

    name = 'pushforward-study'
    description = 'A2 under biLipschitz pushforwards and the Cantor instability demo'
    priority = 50

    uses_seed = True

    arguments = [
        ('a', dict(
            type=float, default=0.5,
            help='cascade mean of sigma (default: 0.5)')),
        ('epsilon', dict(
            type=float, default=0.3,
            help='cascade strength of the pair (default: 0.3)')),
        ('depth', dict(
            type=int, default=8,
            help='dyadic depth of the pair (default: 8)')),
        ('scan_depth', dict(
            type=int, default=6,
            help='lattice depth of the A2 scan family (default: 6)')),
        ('maps', dict(
            type=int, default=100,
            help='number of random piecewise-linear maps (default: 100)')),
        ('max_norm', dict(
            type=float, default=4.0,
            help='largest biLipschitz norm of the random maps (default: 4.0)')),
        ('pieces', dict(
            type=int, default=6,
            help='linear pieces of every random map (default: 6)')),
        ('sweep', dict(
            type=int, default=12,
            help='intervals [0, 2^-j) of the homeomorphism sweep (default: 12)')),
        ('power', dict(
            type=float, default=3.0,
            help='exponent of the non-biLipschitz probe x^p (default: 3.0)')),
        ('cantor_depth', dict(
            type=int, default=8,
            help='generations of the Cantor construction (default: 8)')),
        ('placement', dict(
            type=float, default=0.5,
            help='relative atom position inside every gap (default: 0.5)')),
        ('perturbed', dict(
            type=float, default=0.25,
            help='perturbed relative atom position (default: 0.25)')),
        ('band', dict(
            type=float, default=0.1,
            help='separation band of the atoms from the gap ends (default: 0.1)')),
        ('mass_rule', dict(
            type=str, default='geometric', choices=list(MASS_RULES),
            help='masses of the gap atoms (default: geometric)')),
        ('order', dict(
            type=int, default=16,
            help='Gauss-Legendre order of the Cantor testing integrals '
                 '(default: 16)')),
    ]

    def __init__(self, a, epsilon, depth, scan_depth, maps, max_norm, pieces,
                 sweep, power, cantor_depth, placement, perturbed, band,
                 mass_rule, order, _seed=None):
        self.a = a
        self.epsilon = epsilon
        self.depth = depth
        self.scan_depth = scan_depth
        self.maps = maps
        self.max_norm = max_norm
        self.pieces = pieces
        self.sweep = sweep
        self.power = power
        self.cantor_depth = cantor_depth
        self.placement = placement
        self.perturbed = perturbed
        self.band = band
        self.mass_rule = mass_rule
        self.order = order
        self.seed = _seed

    @classmethod
    def validate(cls, params):
        if not 0 < params['epsilon'] < 1:
            raise ConfigError(f'epsilon={params["epsilon"]} must lie in (0, 1).')
        if not 1 <= params['scan_depth'] <= min(params['depth'], 10):
            raise ConfigError('scan_depth must lie in 1..min(depth, 10).')
        if params['max_norm'] <= 2:
            raise ConfigError('max_norm must exceed 2, the norm of the identity.')
        if params['pieces'] < 1 or params['maps'] < 0:
            raise ConfigError('pieces must be positive and maps nonnegative.')
        if params['power'] <= 0 or params['power'] == 1:
            raise ConfigError('power must be positive and different from 1.')
        if not 1 <= params['cantor_depth'] <= 12:
            raise ConfigError('cantor_depth must lie in 1..12.')
        band = params['band']
        if not 0 < band < 0.5:
            raise ConfigError('band must lie in (0, 1/2).')
        for name in ('placement', 'perturbed'):
            if not band < params[name] < 1 - band:
                raise ConfigError(f'{name}={params[name]} violates the separation '
                                  f'band ({band}, {1 - band}).')

    def run(self, session):
        res = ExperimentResult(self.name)
        rng = np.random.default_rng(self.seed)
        sigma = Measure(density=cascade(CascadeParams(self.a, self.epsilon, self.depth)))
        omega = Measure(density=cascade(CascadeParams(1.0, -self.epsilon, self.depth)))
        scan = lattice_intervals(0.0, 1.0, self.scan_depth)

        log.info('==> A2 under identity and dilation')
        ident = a2_stability_check(sigma, omega, PLMap1D.identity(), scan)
        res.add('a2', 'before', ident.before)
        res.add('a2', 'identity_after', ident.after)
        res.check('a2.identity leaves A2 unchanged', ident.after == ident.before,
                  ident.before, ident.after)
        dilation = a2_stability_check(sigma, omega, PLMap1D.affine(2.0), scan)
        res.add('a2', 'dilation_after', dilation.after)
        res.check('a2.dilation by 2 divides A2 by 4',
                  abs(dilation.after - ident.before / 4) <= 1e-12 * ident.before,
                  ident.before / 4, dilation.after)

        if self.maps > 0:
            log.info(f'==> A2 under {self.maps} random maps')
            tasks = [(stability_row, (i, sigma, omega,
                                      random_pl_map(rng, self.max_norm, self.pieces),
                                      scan))
                     for i in range(self.maps)]
            rows = session.run(tasks, 'Random maps')
            table = pd.DataFrame(rows, columns=[
                'map', 'bilipschitz', 'pieces', 'before', 'after', 'bound',
                'constant'])
            res.add_table('random_maps', table)
            worst = float(table.constant.max())
            res.add('a2', 'random_constant_max', worst)
            res.add('a2', 'random_bilipschitz_max', float(table.bilipschitz.max()))
            res.check('a2.measured constant at most 1 over random maps',
                      worst <= 1 + 1e-12, 1.0, worst)

        log.info('==> Homeomorphism condition')
        power, power_transfer = homeo_condition_check(
            PowerMap(self.power), sweep=self.sweep, sigma=sigma, omega=omega)
        affine, affine_transfer = homeo_condition_check(
            PLMap1D.affine(2.0, 1.0), sweep=self.sweep, sigma=sigma, omega=omega)
        res.add('homeo', 'power_slope', power.slope)
        res.add('homeo', 'power_bounded', power.bounded)
        res.add('homeo', 'affine_ratio', affine.sup_ratio)
        res.add('homeo', 'affine_bounded', affine.bounded)
        res.add_table('homeo_power', pd.DataFrame(
            power.table, columns=['lower', 'upper', 'ratio']))
        res.check('homeo.power map violates the inverse-image bound',
                  not power.bounded, False, power.bounded)
        res.check('homeo.affine map satisfies it with ratio 1/2',
                  affine.bounded and abs(affine.sup_ratio - 0.5) <= 1e-12,
                  0.5, affine.sup_ratio)
        for label, transfer in (('power', power_transfer), ('affine', affine_transfer)):
            res.add('homeo', f'{label}_transfer_before', transfer.before)
            res.add('homeo', f'{label}_transfer_after', transfer.after)
        res.check('homeo.A2 transfer bound for the affine map',
                  affine_transfer.after <= affine_transfer.bound * (1 + 1e-12),
                  affine_transfer.bound, affine_transfer.after)

        log.info(f'==> Cantor demo at depth {self.cantor_depth}')
        demo = cantor_instability_demo(self.cantor_depth, self.placement,
                                       self.perturbed, self.band,
                                       self.mass_rule, self.order)
        res.add('cantor', 'bilipschitz', demo.bilipschitz)
        res.add('cantor', 'sigma_pushed', demo.sigma_pushed)
        res.add('cantor', 'omega_fixed', demo.omega_fixed)
        for name in ('testing', 'testing_dual', 'testing_perturbed',
                     'testing_dual_perturbed'):
            res.add('cantor', name, getattr(demo, name), 'quadrature')
        res.check('cantor.map moves the atoms onto the perturbed ones',
                  demo.sigma_pushed, True, demo.sigma_pushed)
        res.check('cantor.map leaves the Cantor measure untouched',
                  demo.omega_fixed, True, demo.omega_fixed)

        log.info('==> Quarter turns of planar densities')
        planar = tensorize(cascade(CascadeParams(self.a, self.epsilon, 4)), 2)
        mu = Measure(density=planar)
        turned = pushforward(mu, RotationMap.quarter_turn(1))
        values = mu.density.dense()
        same_values = bool(np.array_equal(np.sort(values, axis=None),
                                          np.sort(turned.density.dense(), axis=None)))
        res.add('rotation', 'mass_before', mu.total_mass())
        res.add('rotation', 'mass_after', turned.total_mass())
        res.check('rotation.quarter turn permutes the cells', same_values, True,
                  same_values)
        res.check('rotation.quarter turn conserves mass',
                  abs(turned.total_mass() - mu.total_mass()) <= 1e-12,
                  mu.total_mass(), turned.total_mass())
        full = mu
        for _ in range(4):
            full = pushforward(full, RotationMap.quarter_turn(1))
        cycle = full.equals(mu)
        res.check('rotation.four quarter turns restore the density', cycle,
                  True, cycle)

        log.info('==> Composition on atoms')
        atoms = Measure(points=np.sort(rng.uniform(0, 1, 64)),
                        masses=rng.uniform(0.5, 1.5, 64))
        inner = random_pl_map(rng, self.max_norm, self.pieces)
        outer = random_pl_map(rng, self.max_norm, self.pieces)
        composed = pushforward(atoms, ComposedMap(outer, inner))
        stepwise = pushforward(pushforward(atoms, inner), outer)
        exact = composed.equals(stepwise)
        materialized = pushforward(atoms, outer.compose(inner))
        drift = float(np.abs(materialized.points - composed.points).max())
        res.add('composition', 'materialized_drift', drift, 'quadrature')
        res.check('composition.pushforward is functorial on atoms', exact, True,
                  exact)
        res.check('composition.materialized map agrees', drift <= 1e-12, 0.0, drift)
        return res
